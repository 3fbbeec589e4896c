"""Exception types shared across the package."""


class MirrorPairError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(MirrorPairError, ValueError):
    """A physical parameter or argument is out of its allowed range."""


class ConfigError(MirrorPairError, ValueError):
    """A configuration file could not be parsed or contains unknown keys."""


class DriftUnstableError(MirrorPairError, RuntimeError):
    """The drift matrix has eigenvalues with non-negative real part."""

    def __init__(self, eigenvalues):
        self.eigenvalues = eigenvalues
        offending = [z for z in eigenvalues if z.real >= 0]
        super().__init__(
            "drift matrix is unstable; offending eigenvalues: %s" % (offending,)
        )


class SingularityError(MirrorPairError, RuntimeError):
    """A frequency-domain solve hit a singular shifted drift matrix."""


class DegenerateCommutatorError(MirrorPairError, RuntimeError):
    """The commutator denominator vanished; indicates a convention bug."""


class UnphysicalStateError(MirrorPairError, ValueError):
    """A covariance matrix violates the uncertainty-principle constraint."""

    def __init__(self, margin, message=None):
        self.margin = margin
        super().__init__(
            message or "covariance matrix is unphysical (margin %.3e)" % margin
        )


class GridMismatchError(MirrorPairError, ValueError):
    """Two spectra expected on identical frequency grids disagree."""
