"""Exception types shared across the processing chain.

Plain ``ValueError`` is used for ordinary domain violations (angles out of
range, shape mismatches).  The types below mark conditions the harness maps
to dedicated CLI exit codes or that callers may want to catch separately.
"""


class ChainError(Exception):
    """Base class for chain-specific failures."""


class ConfigError(ChainError):
    """Invalid or inconsistent experiment configuration (CLI exit code 2)."""


class EstimationError(ChainError):
    """A statistical estimate cannot be formed (e.g. too few snapshots)."""


class NumericalError(ChainError):
    """A numerical failure such as a singular covariance (CLI exit code 3)."""
