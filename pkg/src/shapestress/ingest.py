"""
Loading and cleaning of ``date,ticker,price,volume`` panels.

Every sector lives in its own CSV file. :func:`load_panel` validates rows one
at a time and keeps a rejects report; :func:`rectangularize` then reduces all
panels to the trading days on which every ticker of every sector traded.
"""
from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateRecord, EmptyIntersection, ParseError, SchemaError

__all__ = ["Record", "RawPanel", "PanelWindow", "RectangularResult", "load_panel", "rectangularize", "rejects_to_csv"]

HEADER = ["date", "ticker", "price", "volume"]


@dataclass(frozen=True)
class Record:
    date: dt.date
    ticker: str
    price: float
    volume: float


@dataclass
class RawPanel:
    """Validated records of one sector file plus the rows that failed validation."""

    records: list
    source: str = ""
    rejects: list = field(default_factory=list)  # (row number, reason)


@dataclass(frozen=True)
class PanelWindow:
    """Rectangular price and volume arrays, ``(tickers, dates)``, for one sector."""

    tickers: tuple
    dates: tuple
    price: np.ndarray
    volume: np.ndarray
    source: str = ""

    def __post_init__(self):
        shape = (len(self.tickers), len(self.dates))
        if self.price.shape != shape or self.volume.shape != shape:
            raise ValueError(f"price/volume must have shape {shape}")
        if np.any(self.price <= 0):
            raise ValueError("prices must be strictly positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")

    def window(self, start, stop):
        """Sub-panel for dates ``[start, stop)``."""
        return PanelWindow(
            tickers=self.tickers,
            dates=self.dates[start:stop],
            price=self.price[:, start:stop],
            volume=self.volume[:, start:stop],
            source=self.source,
        )

    def to_records(self):
        return [
            Record(d, t, float(self.price[i, j]), float(self.volume[i, j]))
            for i, t in enumerate(self.tickers)
            for j, d in enumerate(self.dates)
        ]


def _parse_row(row):
    date_s, ticker, price_s, volume_s = (v.strip() for v in row)
    try:
        date = dt.date.fromisoformat(date_s)
    except ValueError:
        return None, f"bad date {date_s!r}"
    if not ticker:
        return None, "empty ticker"
    try:
        price = float(price_s)
        volume = float(volume_s)
    except ValueError:
        return None, "non-numeric price or volume"
    if not (math.isfinite(price) and math.isfinite(volume)):
        return None, "non-finite price or volume"
    if price <= 0:
        return None, "price must be positive"
    if volume < 0:
        return None, "volume must be nonnegative"
    return Record(date, ticker, price, volume), None


def load_panel(path):
    """Read one sector file.

    Value-level problems (bad dates, non-numeric or negative fields) land in
    ``rejects`` with their 1-based file row number; structural problems raise.

    Raises
    ------
    FileNotFoundError
    SchemaError
        The header is not exactly ``date,ticker,price,volume``.
    ParseError
        A row has the wrong number of fields or the file is not UTF-8.
    DuplicateRecord
        The same ``(date, ticker)`` appears twice.
    """
    path = str(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8 ({exc})") from None
    if not rows or [h.strip() for h in rows[0]] != HEADER:
        raise SchemaError(f"{path}: header must be {','.join(HEADER)}")

    records, rejects, seen = [], [], {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not v.strip() for v in row):
            continue
        if len(row) != len(HEADER):
            raise ParseError(f"{path}: row {lineno} has {len(row)} fields, expected {len(HEADER)}", row=lineno)
        rec, reason = _parse_row(row)
        if rec is None:
            rejects.append((lineno, reason))
            continue
        key = (rec.date, rec.ticker)
        if key in seen:
            raise DuplicateRecord(
                f"{path}: duplicate record for {rec.ticker} on {rec.date} at rows {seen[key]} and {lineno}",
                rows=(seen[key], lineno),
            )
        seen[key] = lineno
        records.append(rec)
    return RawPanel(records=records, source=path, rejects=rejects)


@dataclass
class RectangularResult:
    """Rectangular panels plus the dates that were dropped and why."""

    panels: list
    dropped: dict  # reason -> sorted list of dates

    @property
    def dropped_counts(self):
        return {reason: len(dates) for reason, dates in self.dropped.items()}


def rectangularize(panels):
    """Restrict all panels to a common set of complete trading days.

    A date survives when every ticker of every panel has a record on it and
    every such record has positive volume. Each dropped date is reported once,
    under ``missing`` if any ticker lacks it and otherwise ``zero_volume``.

    Accepts :class:`RawPanel` or :class:`PanelWindow` inputs, so the operation
    is idempotent.
    """
    panels = list(panels)
    if not panels:
        raise EmptyIntersection("no panels given")
    tables = []
    all_dates = set()
    for panel in panels:
        records = panel.to_records() if isinstance(panel, PanelWindow) else panel.records
        table = {}
        for r in records:
            table.setdefault(r.ticker, {})[r.date] = r
        tables.append((panel.source, table))
        all_dates.update(r.date for r in records)

    missing, zero = [], []
    keep = []
    for date in sorted(all_dates):
        complete = all(date in by_date for _, table in tables for by_date in table.values())
        if not complete:
            missing.append(date)
        elif any(by_date[date].volume <= 0 for _, table in tables for by_date in table.values()):
            zero.append(date)
        else:
            keep.append(date)
    if not keep:
        raise EmptyIntersection("no trading date is complete across all panels")

    out = []
    for source, table in tables:
        tickers = tuple(sorted(table))
        price = np.array([[table[t][d].price for d in keep] for t in tickers], dtype=float)
        volume = np.array([[table[t][d].volume for d in keep] for t in tickers], dtype=float)
        out.append(PanelWindow(tickers=tickers, dates=tuple(keep), price=price, volume=volume, source=source))
    dropped = {"missing": missing, "zero_volume": zero}
    return RectangularResult(panels=out, dropped=dropped)


def rejects_to_csv(panel):
    lines = ["row,reason"]
    for row, reason in panel.rejects:
        text = reason.replace('"', '""')
        lines.append(f'{row},"{text}"')
    return "\n".join(lines) + "\n"
