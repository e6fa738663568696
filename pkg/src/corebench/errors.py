"""Exception types shared across the package.

The CLI maps these onto exit codes: bad input -> 2, enumeration cap -> 3,
violated invariants and failed verifications -> 1.
"""


class CoreBenchError(Exception):
    """Base class for all corebench errors."""


class InputError(CoreBenchError):
    """Malformed or out-of-contract input (bad profile, bad environment, bad flag value)."""


class CapExceededError(CoreBenchError):
    """Instance too large for exact enumeration (see DEFAULT_CAP)."""


class MonotonicityError(CoreBenchError):
    """An allocation curve that must be monotone non-decreasing was observed to decrease."""


class InvariantError(CoreBenchError):
    """An internal invariant failed (e.g. the core LP reported infeasible)."""
