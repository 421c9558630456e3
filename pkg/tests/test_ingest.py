import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapestress import errors
from shapestress.ingest import RawPanel, Record, load_panel, rectangularize, rejects_to_csv

D = dt.date


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_well_formed_file(tmp_path):
    p = write(tmp_path, "a.csv", "date,ticker,price,volume\n"
              "2006-01-02,AAA,10.5,100\n2006-01-02,BBB,20,200\n2006-01-03,AAA,10.7,150\n")
    panel = load_panel(p)
    assert len(panel.records) == 3
    assert panel.rejects == []
    assert panel.records[0] == Record(D(2006, 1, 2), "AAA", 10.5, 100.0)


def test_bad_values_are_rejected_with_row_numbers(tmp_path):
    p = write(tmp_path, "a.csv", "date,ticker,price,volume\n"
              "2006-01-02,AAA,-1,100\n2006-01-02,BBB,20,200\n2006-13-01,AAA,1,1\n"
              "2006-01-03,AAA,x,1\n2006-01-03,BBB,2,-5\n")
    panel = load_panel(p)
    assert len(panel.records) == 1
    assert [r for r, _ in panel.rejects] == [2, 4, 5, 6]
    assert "positive" in panel.rejects[0][1]
    text = rejects_to_csv(panel)
    assert text.splitlines()[0] == "row,reason"
    assert len(text.splitlines()) == 5


def test_duplicate_names_both_rows(tmp_path):
    p = write(tmp_path, "a.csv", "date,ticker,price,volume\n"
              "2006-01-02,AAA,1,1\n2006-01-03,AAA,1,1\n2006-01-02,AAA,2,2\n")
    with pytest.raises(errors.DuplicateRecord) as info:
        load_panel(p)
    assert info.value.rows == (2, 4)
    assert "2" in str(info.value) and "4" in str(info.value)


def test_wrong_header(tmp_path):
    p = write(tmp_path, "a.csv", "day,ticker,price,volume\n2006-01-02,AAA,1,1\n")
    with pytest.raises(errors.SchemaError):
        load_panel(p)


def test_wrong_field_count(tmp_path):
    p = write(tmp_path, "a.csv", "date,ticker,price,volume\n2006-01-02,AAA,1\n")
    with pytest.raises(errors.ParseError) as info:
        load_panel(p)
    assert info.value.row == 2


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_panel(tmp_path / "nope.csv")


def test_not_utf8(tmp_path):
    p = tmp_path / "a.csv"
    p.write_bytes(b"date,ticker,price,volume\n2006-01-02,\xff\xfe,1,1\n")
    with pytest.raises(errors.ParseError):
        load_panel(p)


def raw(rows, source="s"):
    return RawPanel(records=[Record(*r) for r in rows], source=source)


def test_identical_dates_nothing_dropped():
    a = raw([(D(2006, 1, 2), "A", 1, 1), (D(2006, 1, 3), "A", 1, 1)])
    b = raw([(D(2006, 1, 2), "B", 1, 1), (D(2006, 1, 3), "B", 1, 1)])
    res = rectangularize([a, b])
    assert res.dropped_counts == {"missing": 0, "zero_volume": 0}
    assert res.panels[0].dates == (D(2006, 1, 2), D(2006, 1, 3))


def test_missing_date_dropped_once_everywhere():
    a = raw([(D(2006, 1, 2), "A", 1, 1), (D(2006, 1, 3), "A", 1, 1), (D(2006, 1, 2), "C", 1, 1)])
    b = raw([(D(2006, 1, 2), "B", 1, 1), (D(2006, 1, 3), "B", 1, 1)])
    res = rectangularize([a, b])
    assert res.dropped == {"missing": [D(2006, 1, 3)], "zero_volume": []}
    assert all(p.dates == (D(2006, 1, 2),) for p in res.panels)
    assert res.panels[0].tickers == ("A", "C")


def test_zero_volume_dropped_with_reason():
    a = raw([(D(2006, 1, 2), "A", 1, 0), (D(2006, 1, 3), "A", 1, 1)])
    b = raw([(D(2006, 1, 2), "B", 1, 1), (D(2006, 1, 3), "B", 1, 1)])
    res = rectangularize([a, b])
    assert res.dropped == {"missing": [], "zero_volume": [D(2006, 1, 2)]}


def test_empty_intersection():
    a = raw([(D(2006, 1, 2), "A", 1, 1)])
    b = raw([(D(2006, 1, 3), "B", 1, 1)])
    with pytest.raises(errors.EmptyIntersection):
        rectangularize([a, b])
    with pytest.raises(errors.EmptyIntersection):
        rectangularize([])


records = st.lists(
    st.tuples(st.integers(0, 9), st.sampled_from("ABC"), st.sampled_from([0.0, 1.0, 5.0])),
    min_size=1, max_size=40, unique_by=lambda r: (r[0], r[1]),
)


@settings(max_examples=80, deadline=None)
@given(records, records)
def test_rectangularize_matches_set_computation_and_is_idempotent(r1, r2):
    base = D(2006, 1, 2)
    panels = [raw([(base + dt.timedelta(days=d), t + str(i), 2.0, v) for d, t, v in rs], f"p{i}")
              for i, rs in enumerate((r1, r2))]
    # independent oracle: intersection of per-ticker date sets minus zero-volume dates
    per_ticker = {}
    zero = set()
    for p in panels:
        for r in p.records:
            per_ticker.setdefault(r.ticker, set()).add(r.date)
            if r.volume <= 0:
                zero.add(r.date)
    expected = sorted(set.intersection(*per_ticker.values()) - zero)
    if not expected:
        with pytest.raises(errors.EmptyIntersection):
            rectangularize(panels)
        return
    once = rectangularize(panels)
    assert list(once.panels[0].dates) == expected
    twice = rectangularize(once.panels)
    assert twice.dropped_counts == {"missing": 0, "zero_volume": 0}
    for a, b in zip(once.panels, twice.panels):
        assert a.tickers == b.tickers and a.dates == b.dates
        assert np.array_equal(a.price, b.price) and np.array_equal(a.volume, b.volume)
