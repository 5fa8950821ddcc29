"""Exception hierarchy shared across the toolkit.

Every exception maps to a stable CLI exit code (see :mod:`fracplap.cli`).
"""


class FracplapError(Exception):
    """Base class for all toolkit errors."""


class InvalidParams(FracplapError):
    """Fractional parameters or solver configuration violate an invariant."""


class InvalidDomain(FracplapError):
    """Domain description violates an invariant (empty, inverted, overlapping)."""


class NonpositiveScale(FracplapError):
    """Dilation factor must be strictly positive."""


class EmptyGrid(FracplapError):
    """No lattice point falls strictly inside the domain."""


class GridMismatch(FracplapError):
    """A discrete function does not live on the expected grid."""


class ZeroFunction(FracplapError):
    """Rayleigh quotient of the zero function is undefined."""


class WrongExponent(FracplapError):
    """Operation requires p = 2."""


class WindowTooSmall(FracplapError):
    """Slope-fit window contains too few eigenvalues."""


class OrderViolation(FracplapError):
    """Level ordering lambda' > lambda0 violated."""


class SizeOrder(FracplapError):
    """Packing/covering requires the small side not to exceed the large one."""


class SubcriticalExponent(FracplapError):
    """Upper counting bound requires s*p > N."""


class NotNested(FracplapError):
    """Domain-monotonicity check requires nested lattice-compatible domains."""


class NotABall(FracplapError):
    """Radial-symmetry check requires a ball domain."""
