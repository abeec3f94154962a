"""Exception hierarchy shared by every analysis module."""


class IcebreakerError(ValueError):
    """Base class for invalid inputs and violated preconditions."""


class ParseError(IcebreakerError):
    """Malformed input document.

    ``row`` and ``column`` are 1-based positions in the source text when
    they can be attributed.
    """

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class GapError(ParseError):
    """Years in the input are not contiguous."""

    def __init__(self, missing_year, row=None):
        super().__init__(f"gap at {missing_year}", row=row)
        self.missing_year = missing_year


class MissingValuesError(IcebreakerError):
    """An operation requiring complete data received missing values."""


class RankError(IcebreakerError):
    """Design matrix is rank deficient or has too few rows."""


class DegenerateSeriesError(IcebreakerError):
    """Series with zero variance where a scale is required."""
