"""Exception types shared across the package."""


class FuncgradError(Exception):
    """Base class for all funcgrad errors."""


class GridMismatch(FuncgradError):
    """Two curves do not live on the same grid."""


class EmptySample(FuncgradError):
    """An operation received a sample with no curves."""


class InsufficientSample(FuncgradError):
    """Too few curves for the requested estimate."""


class AsymmetricMatrix(FuncgradError):
    """A covariance matrix failed its symmetry check."""


class DegenerateSpectrum(FuncgradError):
    """All eigenvalues are zero, so no components can be selected."""


class EmptyNeighborhood(FuncgradError):
    """No sample curve received positive kernel weight (bandwidth too small)."""


class ZeroDifference(FuncgradError):
    """Two curves coincide, so their alignment is undefined."""


class EmptyPairNeighborhood(FuncgradError):
    """No curve pair received positive weight (bandwidths too small)."""


class InvalidDirection(FuncgradError):
    """Direction coefficients do not form a unit vector."""


class MissingComponent(FuncgradError):
    """A gradient component flagged absent was used in a computation."""


class ZeroGradient(FuncgradError):
    """All gradient components vanish; the steepest direction is undefined."""


class InsufficientTimepoints(FuncgradError):
    """A longitudinal table has too few time points for difference quotients."""


class FormatError(FuncgradError):
    """A data file violates the expected layout."""
