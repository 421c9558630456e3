import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shapestress.simulate import panel_records  # noqa: E402

_ACCEPTANCE = {}


def write_sector_files(directory, panels):
    """Write each panel as a ``date,ticker,price,volume`` CSV; return the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for panel in panels:
        lines = ["date,ticker,price,volume"]
        lines += [f"{r.date.isoformat()},{r.ticker},{r.price!r},{r.volume!r}" for r in panel_records(panel)]
        path = directory / f"{panel.source}.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def write_manifest(path, sector_files, **options):
    lines = [f"sector_file = {p}" for p in sector_files]
    lines += [f"{k} = {v}" for k, v in options.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


@pytest.fixture
def acceptance(request):
    """Record the outcome of one acceptance criterion for the terminal summary."""
    marker = request.node.get_closest_marker("criterion")
    label = marker.args[0] if marker else request.node.name
    _ACCEPTANCE[label] = "FAIL"
    yield
    rep = getattr(request.node, "rep_call", None)
    _ACCEPTANCE[label] = "PASS" if rep is not None and rep.passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{_ACCEPTANCE[label]}  {label}")
