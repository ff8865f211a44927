"""Exception types raised by the samplers."""


class ExactSDEError(Exception):
    """Base class for every error raised by this package."""


class ConditionViolation(ExactSDEError, ValueError):
    """A declared regularity bound is breached at some grid point."""

    def __init__(self, condition, u, value, report=None):
        self.condition = condition
        self.u = u
        self.value = value
        self.report = report
        super().__init__(f"condition {condition} violated at u={u!r} (value={value!r})")

    def __reduce__(self):
        return type(self), (self.condition, self.u, self.value, self.report)


class EnvelopeUnavailable(ExactSDEError):
    """Neither |alpha| bound nor endpoint bound is declared."""


class NonTermination(ExactSDEError):
    """An inner rejection sampler exhausted its proposal budget."""


class ProposalBudgetExceeded(ExactSDEError):
    """No path proposal was accepted within the allowed budget."""


class PhiOutOfRange(ExactSDEError):
    """phi evaluated outside [0, 1/T]; k1 or k2 is mis-declared."""


class BadOrdering(ExactSDEError, ValueError):
    pass


class OutOfSpan(ExactSDEError, ValueError):
    pass


class LevelBelowStart(ExactSDEError, ValueError):
    pass


class InvalidBarrier(ExactSDEError, ValueError):
    pass


class EmptySample(ExactSDEError, ValueError):
    pass
