"""Core containers passed between the analysis modules."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import IcebreakerError, MissingValuesError

SEASONS = ("summer", "winter", "annual", "raw")


@dataclass(frozen=True)
class MonthlySeries:
    """Year x month grid of observations.

    ``values`` has shape ``(n_years, 12)``; cells flagged in ``missing``
    hold NaN and never enter an aggregate.
    """

    name: str
    first_year: int
    values: np.ndarray
    missing: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        missing = np.asarray(self.missing, dtype=bool)
        if values.ndim != 2 or values.shape[1] != 12:
            raise IcebreakerError(f"monthly values must be (years, 12), got {values.shape}")
        if missing.shape != values.shape:
            raise IcebreakerError("missing mask does not match values")
        if self.first_year < 1:
            raise IcebreakerError("first_year must be >= 1")
        values = np.where(missing, np.nan, values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)

    @property
    def n_years(self) -> int:
        return self.values.shape[0]

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.first_year, self.first_year + self.n_years)


@dataclass(frozen=True)
class AnnualSeries:
    """One value per calendar year, starting at ``first_year``."""

    name: str
    first_year: int
    values: np.ndarray
    missing: Optional[np.ndarray] = None
    season: str = "raw"
    unit: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size < 1:
            raise IcebreakerError("series must contain at least one value")
        if self.missing is None:
            missing = np.isnan(values)
        else:
            missing = np.array(self.missing, dtype=bool).reshape(-1)
            if missing.shape != values.shape:
                raise IcebreakerError("missing mask does not match values")
            missing = missing | np.isnan(values)
        if self.season not in SEASONS:
            raise IcebreakerError(f"unknown season {self.season!r}")
        values[missing] = np.nan
        values.flags.writeable = False
        missing.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)
        object.__setattr__(self, "first_year", int(self.first_year))

    def __len__(self):
        return self.values.size

    @property
    def last_year(self) -> int:
        return self.first_year + len(self) - 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.first_year, self.first_year + len(self))

    @property
    def has_missing(self) -> bool:
        return bool(self.missing.any())

    def complete(self) -> np.ndarray:
        """Return a writable copy of the values, refusing gaps."""
        if self.has_missing:
            raise MissingValuesError(
                f"series {self.name!r} has {int(self.missing.sum())} missing "
                "values; run impute_median first"
            )
        return np.array(self.values)

    def with_values(self, values, **changes) -> "AnnualSeries":
        return replace(self, values=np.asarray(values, dtype=float), missing=None, **changes)

    @classmethod
    def from_array(cls, values, first_year=1, name="series", **kw) -> "AnnualSeries":
        return cls(name=name, first_year=first_year, values=values, **kw)


@dataclass
class DependenceReport:
    """Outcome of one conditional-mean-independence test."""

    test: str
    statistic: float
    p_value: float
    chosen_lag: Optional[float] = None
    bootstrap_reps: Optional[int] = None
    window: Optional[tuple] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise IcebreakerError(f"p-value {self.p_value} outside [0, 1]")
        if self.chosen_lag is not None and self.chosen_lag < 1:
            raise IcebreakerError(f"chosen lag {self.chosen_lag} below 1")

    def as_row(self) -> dict:
        lo, hi = self.window if self.window else (None, None)
        return {
            "test": self.test,
            "from_year": lo,
            "to_year": hi,
            "statistic": self.statistic,
            "chosen_lag": self.chosen_lag,
            "p_value": self.p_value,
        }
