"""Exception hierarchy shared by all geodecomp modules."""


class GeoDecompError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(GeoDecompError, ValueError):
    pass


class SingularGram(GeoDecompError, ValueError):
    """The Gram matrix does not define a nondegenerate bilinear form."""


class OddSymplecticDimension(GeoDecompError, ValueError):
    pass


class NonFiniteValue(GeoDecompError, ArithmeticError):
    """A field evaluation produced NaN or Inf."""


class NonzeroConstantTerm(GeoDecompError, ValueError):
    pass


class QuadratureNonconvergence(GeoDecompError, RuntimeError):
    pass


class DegreeLimitExceeded(GeoDecompError, ValueError):
    pass


class BlowUp(GeoDecompError, RuntimeError):
    """Trajectory left the bounding ball; the field looks incomplete."""


class MaxStepsExceeded(GeoDecompError, RuntimeError):
    pass


class SpecParseError(GeoDecompError, ValueError):
    """Malformed system spec or polynomial text."""
