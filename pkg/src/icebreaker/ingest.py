"""Readers for the temperature-record formats and basic series preparation.

Two input layouts are understood:

* fixed-width monthly tables (one row per year: year, twelve monthly
  values, optionally an annual column), as distributed for the Central
  England record, with ``-99.9`` marking missing months;
* two-column ``year,value`` CSV files for annual reconstructions.
"""

from __future__ import annotations

import csv
import io
import math
import re

import numpy as np

from .data import AnnualSeries, MonthlySeries
from .errors import GapError, IcebreakerError, MissingValuesError, ParseError

MISSING_SENTINEL = -99.9
_YEAR_ROW = re.compile(r"^\s*\d{4}(\s|$)")


def _is_sentinel(value):
    return math.isclose(value, MISSING_SENTINEL, abs_tol=1e-9) or value <= -99.0


def parse_monthly_fixedwidth(text, name="monthly"):
    """Parse a whitespace-separated monthly table.

    Lines before the first row whose first token is a four-digit year are
    treated as header and skipped. A trailing annual column is ignored.

    Parameters
    ----------
    text : str
        Document contents.
    name : str
        Label stored on the result.

    Returns
    -------
    MonthlySeries
    """
    years = []
    rows = []
    started = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if not _YEAR_ROW.match(line):
            if started:
                raise ParseError("expected a row starting with a year", row=lineno)
            continue
        started = True
        tokens = line.split()
        if len(tokens) < 13:
            raise ParseError(
                f"expected 12 monthly columns, found {len(tokens) - 1}", row=lineno
            )
        year = int(tokens[0])
        months = []
        for col, tok in enumerate(tokens[1:13], start=2):
            try:
                months.append(float(tok))
            except ValueError:
                raise ParseError(f"non-numeric cell {tok!r}", row=lineno, column=col) from None
        if years and year != years[-1] + 1:
            if year <= years[-1]:
                raise ParseError(f"year {year} out of order", row=lineno)
            raise GapError(years[-1] + 1, row=lineno)
        years.append(year)
        rows.append(months)
    if not rows:
        raise ParseError("no data rows found")
    values = np.array(rows, dtype=float)
    missing = np.vectorize(_is_sentinel)(values)
    return MonthlySeries(name=name, first_year=years[0], values=values, missing=missing)


def format_monthly_fixedwidth(m):
    """Write a :class:`MonthlySeries` back in the fixed-width layout."""
    out = []
    for year, row, miss in zip(m.years, m.values, m.missing):
        cells = [
            f"{MISSING_SENTINEL:6.1f}" if flag else f"{val:6.1f}" for val, flag in zip(row, miss)
        ]
        out.append(f"{year:4d}" + "".join(" " + c for c in cells))
    return "\n".join(out) + "\n"


def parse_annual_csv(text, name="annual"):
    """Parse a ``year,value`` CSV; an empty value marks a missing year."""
    reader = csv.reader(io.StringIO(text.lstrip("﻿")))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty document") from None
    if [h.strip().lower() for h in header[:2]] != ["year", "value"]:
        raise ParseError("header must be 'year,value'", row=1)
    years, values = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) < 2:
            raise ParseError("expected two columns", row=lineno)
        try:
            year = int(row[0].strip())
        except ValueError:
            raise ParseError(f"bad year {row[0]!r}", row=lineno, column=1) from None
        cell = row[1].strip()
        try:
            value = float(cell) if cell else math.nan
        except ValueError:
            raise ParseError(f"non-numeric value {cell!r}", row=lineno, column=2) from None
        if years:
            if year == years[-1]:
                raise ParseError(f"duplicate year {year}", row=lineno)
            if year < years[-1]:
                raise ParseError(f"descending year {year}", row=lineno)
            if year != years[-1] + 1:
                raise GapError(years[-1] + 1, row=lineno)
        years.append(year)
        values.append(value)
    if not years:
        raise ParseError("no data rows found")
    return AnnualSeries(name=name, first_year=years[0], values=values, season="raw")


def format_annual_csv(s):
    """Serialise an :class:`AnnualSeries` as ``year,value`` CSV."""
    lines = ["year,value"]
    for year, value, miss in zip(s.years, s.values, s.missing):
        lines.append(f"{year},{'' if miss else repr(float(value))}")
    return "\n".join(lines) + "\n"


def seasonal_aggregate(m, season):
    """Collapse a monthly grid to summer (JJA) or winter (DJF) means.

    The December of year ``y`` counts towards the winter of ``y + 1``, so
    the first winter is always missing. Any missing contributing month
    makes the seasonal value missing.
    """
    v = m.values
    if season == "summer":
        out = v[:, 5:8].mean(axis=1)
    elif season == "winter":
        prev_dec = np.concatenate([[np.nan], v[:-1, 11]])
        out = (prev_dec + v[:, 0] + v[:, 1]) / 3.0
    else:
        raise IcebreakerError(f"season must be 'summer' or 'winter', got {season!r}")
    return AnnualSeries(
        name=m.name, first_year=m.first_year, values=out, season=season, unit="degC"
    )


def impute_median(s):
    """Replace missing values by the median of the observed ones."""
    observed = s.values[~s.missing]
    if observed.size == 0:
        raise MissingValuesError(f"series {s.name!r} has no observed values")
    values = np.where(s.missing, np.median(observed), s.values)
    return s.with_values(values)


def demean(s):
    """Subtract the sample mean; requires a complete series."""
    if s.has_missing:
        raise MissingValuesError("demean needs a complete series; run impute_median first")
    v = s.values - s.values.mean()
    # second pass removes the rounding residue of the first
    v = v - v.mean()
    return s.with_values(v)


def window(s, from_year, to_year):
    """Sub-series covering ``from_year`` .. ``to_year`` inclusive."""
    if from_year > to_year:
        raise IcebreakerError(f"empty window {from_year}-{to_year}")
    if from_year < s.first_year or to_year > s.last_year:
        raise IcebreakerError(
            f"window {from_year}-{to_year} outside series range "
            f"{s.first_year}-{s.last_year}"
        )
    lo = from_year - s.first_year
    hi = to_year - s.first_year + 1
    return AnnualSeries(
        name=s.name,
        first_year=from_year,
        values=s.values[lo:hi],
        missing=s.missing[lo:hi],
        season=s.season,
        unit=s.unit,
    )


def read_series(path, fmt=None, season="raw", name=None):
    """Load an annual series from disk.

    ``fmt`` is ``"csv"`` or ``"fixedwidth"`` (guessed from the suffix when
    omitted). Monthly tables need ``season`` in {summer, winter}.
    """
    from pathlib import Path

    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "fixedwidth"
    name = name or path.stem
    if fmt == "csv":
        return parse_annual_csv(text, name=name)
    if fmt == "fixedwidth":
        monthly = parse_monthly_fixedwidth(text, name=name)
        if season not in ("summer", "winter"):
            raise IcebreakerError("monthly input needs --season summer or winter")
        return seasonal_aggregate(monthly, season)
    raise IcebreakerError(f"unknown format {fmt!r}")
