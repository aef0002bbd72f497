"""Exception and warning types shared across the package.

Domain errors (bad parameters, inputs outside the valid range) and numerical
failures (step underflow, non-convergence) are kept in separate branches so
the CLI can map them onto distinct exit codes.
"""


class RosslerLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RosslerLabError):
    """Input lies outside the domain of the requested operation."""


class NumericalFailure(RosslerLabError):
    """A numerical procedure failed to produce a trustworthy answer."""


class DegenerateParams(DomainError):
    pass


class OutOfRange(DomainError):
    pass


class EmptyPerSet(DomainError):
    pass


class DegenerateTriangle(DomainError):
    pass


class NotSaddleFocus(DomainError):
    """The fixed point does not have the saddle-focus sign pattern."""


class BranchDomainError(DomainError):
    """An inverse branch sqrt(x - c) was asked for x < c."""


class LeftInvariantInterval(NumericalFailure):
    pass


class IncomparableDepth(RosslerLabError):
    """Two symbol sequences agree on every available symbol."""


class StepSizeUnderflow(NumericalFailure):
    def __init__(self, t, h):
        super().__init__(f"step size {h:.3e} underflowed at t={t:.6g}")
        self.t = t
        self.h = h


class NoConvergence(NumericalFailure):
    pass


class NoFoldFound(NumericalFailure):
    """The empirical successor relation has no interior extremum."""


class FrontBlowup(NumericalFailure):
    """Manifold front refinement exceeded its point budget."""


class EmptyTrace(NumericalFailure):
    """A separatrix escaped before producing a single section crossing."""


class Escaped(RosslerLabError):
    """Trajectory left the escape ball before the requested event."""

    def __init__(self, t, state):
        super().__init__(f"trajectory escaped at t={t:.6g}")
        self.t = t
        self.state = state


class NoReturn(RosslerLabError):
    """No return to the section within the time budget."""


class NotMinimalPeriod(RosslerLabError):
    """A periodic point was found, but its minimal period divides the requested one."""

    def __init__(self, period, orbit=None):
        super().__init__(f"orbit has smaller minimal period {period}")
        self.period = period
        self.orbit = orbit


class TangencyWarning(UserWarning):
    """A section crossing is nearly tangential (|F.n| < 1e-8)."""


class AmbiguousSymbol(NumericalFailure):
    """A point lies within the ambiguity band of the partition boundary."""
