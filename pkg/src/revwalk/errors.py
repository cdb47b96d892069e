"""Exception hierarchy shared by all revwalk modules."""


class RevwalkError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(RevwalkError):
    pass


class NotStochastic(RevwalkError):
    pass


class InvalidProbability(RevwalkError):
    pass


class InvalidParameter(RevwalkError):
    pass


class NotAGroup(RevwalkError):
    pass


class NotErgodic(RevwalkError):
    pass


class NotStationary(RevwalkError):
    pass


class NotReversible(RevwalkError):
    pass


class NotPrimitive(RevwalkError):
    pass


class NotMixedWithin(RevwalkError):
    """The mixing criterion was not reached within t_max steps."""

    def __init__(self, t_max):
        super().__init__(f"mixing criterion not reached within t_max={t_max}")
        self.t_max = t_max


class CriterionNotMet(RevwalkError):
    """The reversibility-on-average criterion failed for every j <= j_max."""

    def __init__(self, j_max):
        super().__init__(f"criterion not met for any j <= {j_max}")
        self.j_max = j_max


class DomainError(RevwalkError):
    pass


class ConstructionFailed(RevwalkError):
    pass


class NotSymmetric(RevwalkError):
    pass


class NormTooLarge(RevwalkError):
    pass


class NotEvenParity(RevwalkError):
    pass


class NotSymmetricEncoding(RevwalkError):
    pass


class TooLarge(RevwalkError):
    pass


class GapClosed(RevwalkError):
    pass


class ScalingViolation(RevwalkError):
    pass


class NotIrreducibleBlock(RevwalkError):
    pass


class Extinct(RevwalkError):
    pass


class KernelSpecError(RevwalkError):
    """A kernel spec document failed to parse or validate."""
