"""Change-point and serial-dependence tools for annual climate series."""

from importlib.resources import files

from .data import AnnualSeries, DependenceReport, MonthlySeries
from .errors import IcebreakerError

__version__ = "0.1.0"

__all__ = [
    "AnnualSeries",
    "DependenceReport",
    "IcebreakerError",
    "MonthlySeries",
    "fixture_path",
]


def fixture_path(name):
    """Path of a bundled example file (``step.csv``, ``iid.csv``, ...)."""
    return files(__package__) / "fixtures" / name
