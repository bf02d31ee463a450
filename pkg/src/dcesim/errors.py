"""Exception and warning types shared across the package."""


class DceSimError(Exception):
    """Base class for all package errors."""


class NonPositiveCutoff(DceSimError):
    """Fock cutoff below 1 would leave no field dynamics to simulate."""


class DimensionMismatch(DceSimError):
    """Operands live on different Hilbert spaces."""


class NonHermitianObservable(DceSimError):
    """Expectation value requested for an operator that is not hermitian."""


class VariantMismatch(DceSimError):
    """Operation requires the full Hamiltonian variant."""


class NormDriftExceeded(DceSimError):
    """State norm drifted beyond tolerance; integrator step too large."""


class TraceDriftExceeded(DceSimError):
    """Density-matrix trace drifted beyond tolerance."""


class PositivityViolation(DceSimError):
    """Density matrix developed a negative eigenvalue beyond tolerance."""


class OrderOutOfRange(DceSimError):
    """Perturbative order outside the supported range 1..3."""


class EmptySeries(DceSimError):
    """Reduction requested over a series with no samples."""


class ConfigInvalid(DceSimError):
    """Configuration rejected before any work was done."""


class TruncationWarning(UserWarning):
    """Cutoff-state population exceeded the monitoring threshold."""
