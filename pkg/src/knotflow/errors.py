"""Exception hierarchy shared by all knotflow modules.

Every error carries a stable machine-readable name (the class name) that the
CLI emits on failure.
"""


class KnotflowError(Exception):
    """Base class for all knotflow errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class MeanNotZero(KnotflowError):
    """Tangent field has a nonzero mean beyond tolerance."""


class ConstraintViolated(KnotflowError):
    """Unit-speed or mean-zero invariant failed where required."""


class DegenerateChord(KnotflowError):
    """Two distinct samples are closer than the chord floor."""


class ZeroVelocity(KnotflowError):
    """Input curve has a vanishing segment."""


class NoConvergence(KnotflowError):
    """Constraint projection failed to reach tolerance."""


class InadmissibleParameters(KnotflowError):
    """Kernel parameters violate their admissibility range."""


class InadmissibleExponent(KnotflowError):
    """Exponent outside the admissible range of the operation."""


class SingularGram(KnotflowError):
    """Gram matrix of the tangent field is numerically singular."""


class StepUnderflow(KnotflowError):
    """Adaptive step controller ran out of halvings."""


class NonRemovableSingularity(KnotflowError):
    """Moment integrand diverges at zero separation for this kernel."""


class ParameterOutOfRange(KnotflowError):
    """Generator parameter outside its admissible range."""


class SelfIntersection(KnotflowError):
    """Generated curve fails the embeddedness check."""


class ParseError(KnotflowError):
    """Malformed spec string or curve file."""
