"""Exception hierarchy shared across the package.

Every error a pipeline stage raises on bad input derives from
RiskPatternsError so the CLI can catch one type and exit with status 1.
"""


class RiskPatternsError(Exception):
    """Base class for all domain errors raised by this package."""


class DatasetError(RiskPatternsError):
    """Malformed or inconsistent input data (matrix, schema, time series)."""


class StatsError(RiskPatternsError):
    """Invalid input to a statistical routine."""


class MiningError(RiskPatternsError):
    """Mining cannot proceed (bad config, dataset too small, ...)."""


class CandidateRejected(RiskPatternsError):
    """A candidate itemset cannot be scored; carries a reason code."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class StoreError(RiskPatternsError):
    """Pattern store file is missing fields, corrupt, or inconsistent."""


class EvaluationError(RiskPatternsError):
    """Growth backtest cannot be computed for the requested window."""
