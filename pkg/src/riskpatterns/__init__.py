"""County-level risk pattern mining and serving."""

__version__ = "0.1.0"
