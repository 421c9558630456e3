import numpy as np
import pytest

from shapestress import errors
from shapestress.io import (
    parse_manifest,
    read_configuration,
    read_run_manifest,
    staged_directory,
    write_configuration,
)


def test_configuration_roundtrip_is_exact(tmp_path):
    X = np.random.default_rng(0).standard_normal((6, 2))
    write_configuration(tmp_path / "c.csv", X)
    assert np.array_equal(read_configuration(tmp_path / "c.csv"), X)


def test_configuration_errors(tmp_path):
    (tmp_path / "a.csv").write_text("")
    with pytest.raises(errors.SchemaError):
        read_configuration(tmp_path / "a.csv")
    (tmp_path / "b.csv").write_text("x,y\n1,two\n")
    with pytest.raises(errors.SchemaError):
        read_configuration(tmp_path / "b.csv")


def test_manifest_parsing(tmp_path):
    (tmp_path / "m.cfg").write_text(
        "# comment\nsector_file = a.csv\nsector_file = b.csv  # trailing\n"
        "sector_files = c.csv, d.csv\nwindow-count = 5\nalpha = 0.2\n"
    )
    raw = parse_manifest(tmp_path / "m.cfg")
    assert raw["sector_file"] == ["a.csv", "b.csv"]
    m = read_run_manifest(tmp_path / "m.cfg")
    assert [p.rsplit("/", 1)[1] for p in m.sector_files] == ["a.csv", "b.csv", "c.csv", "d.csv"]
    assert m.sector_files[0].startswith(str(tmp_path))
    assert (m.window_count, m.alpha, m.seed) == (5, 0.2, 0)


@pytest.mark.parametrize("body", [
    "sector_file = a.csv\n",
    "sector_file = a\nsector_file = b\nwindow_count = 1\n",
    "sector_file = a\nsector_file = b\nalpha = 1.5\n",
    "sector_file = a\nsector_file = b\nalpha = lots\n",
    "sector_file = a\nsector_file = b\nseed = 1\nseed = 2\n",
    "sector_file a\n",
])
def test_manifest_errors(tmp_path, body):
    (tmp_path / "m.cfg").write_text(body)
    with pytest.raises(errors.ManifestError):
        read_run_manifest(tmp_path / "m.cfg")


def test_staged_directory_commits_and_rolls_back(tmp_path):
    target = tmp_path / "out"
    with pytest.raises(RuntimeError):
        with staged_directory(target) as stage:
            (stage / "half.txt").write_text("x")
            raise RuntimeError("boom")
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []
    with staged_directory(target) as stage:
        (stage / "done.txt").write_text("y")
    assert (target / "done.txt").read_text() == "y"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out"]
