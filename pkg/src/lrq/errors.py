"""Exception types raised by lrq."""


class LRQError(Exception):
    """Base class for all lrq errors."""


class DomainError(LRQError, ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(LRQError, OverflowError):
    """An argument would overflow exact integer arithmetic."""


class InputError(LRQError, ValueError):
    """Malformed input data: grid mismatch, non-finite samples, bad shapes."""


class SingularityError(LRQError, FloatingPointError):
    """The invariant angle reached a pole of the spherical chart."""

    def __init__(self, t, lam):
        self.t = float(t)
        self.lam = float(lam)
        super().__init__(
            f"invariant angle lambda={self.lam:.6g} reached a chart pole at t={self.t:.6g}"
        )
