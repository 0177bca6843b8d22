"""Exception hierarchy shared across the package."""


class CapDemandError(Exception):
    """Base class for all package errors."""


class MarketDataError(CapDemandError, ValueError):
    """Bad market input: malformed CSV rows, duplicate years, invalid values.

    ``row`` is the 1-based line number in the source text when known.
    """

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class EstimationError(CapDemandError, ValueError):
    """The regression cannot be run or interpreted (too few points, no price variation, wrong sign)."""


class ScenarioError(CapDemandError, ValueError):
    """A welfare scenario failed; ``label`` names the offending scenario."""

    def __init__(self, message, label=None):
        self.label = label
        if label is not None:
            message = f"scenario {label!r}: {message}"
        super().__init__(message)
