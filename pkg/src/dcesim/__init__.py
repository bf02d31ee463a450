"""Moving-qubit cavity QED simulator.

A two-level system bouncing classically inside a cavity modulates its
coupling to one bosonic mode; driving at the mode frequency generates
photons from vacuum without exciting the qubit. The package simulates the
closed and dissipative dynamics, computes perturbative corrections with
secular-term detection, and sweeps the parameter space behind the standard
figure datasets.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigInvalid,
    DceSimError,
    DimensionMismatch,
    EmptySeries,
    NonHermitianObservable,
    NonPositiveCutoff,
    NormDriftExceeded,
    OrderOutOfRange,
    PositivityViolation,
    TraceDriftExceeded,
    TruncationWarning,
    VariantMismatch,
)
from .qspace import (  # noqa: F401
    DensityMatrix,
    HilbertSpace,
    Operator,
    StateVector,
    basis_state,
    build_operator,
    expectation,
    ground_state,
    make_space,
)
from .model import (  # noqa: F401
    BounceTrajectory,
    ModelParams,
    coupling,
    coupling_closed_form,
    coupling_operator,
    hamiltonian,
    interaction_hamiltonian,
    position,
    static_hamiltonian,
)
from .dynamics import (  # noqa: F401
    LindbladSpec,
    TimeGrid,
    TimeSeries,
    TruncationReport,
    evolve_lindblad,
    evolve_schrodinger,
    max_over_time,
    observables_series,
    validate_truncation,
)
from .dyson import (  # noqa: F401
    DysonStack,
    SecularReport,
    classify_all,
    detuning_scan,
    dyson_corrections,
    reconstruct,
    reconstruct_and_compare,
    secular_components,
    secular_fit,
)
from .sweep import (  # noqa: F401
    AxisSpec,
    PRESET_NAMES,
    SweepConfig,
    SweepResult,
    preset_config,
    run_sweep,
)
