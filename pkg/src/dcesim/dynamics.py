"""Time evolution: unitary and Lindblad integration, observables, truncation.

The integrator is classical fixed-step 4th-order Runge–Kutta with default
dt = 1e-3/ω and snapshots every 0.1/ω; adequacy is enforced by norm/trace
drift checks and a step-halving convergence test rather than trust.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    ConfigInvalid,
    DimensionMismatch,
    EmptySeries,
    NormDriftExceeded,
    PositivityViolation,
    TraceDriftExceeded,
    TruncationWarning,
)
from .model import ModelParams, coupling_operator, static_hamiltonian
from .qspace import (
    DensityMatrix,
    HilbertSpace,
    Operator,
    StateVector,
    build_operator,
)

NORM_DRIFT_TOL = 1e-8
TRACE_DRIFT_TOL = 1e-6
HERMITICITY_DRIFT_TOL = 1e-8
POSITIVITY_TOL = 1e-6
TRUNCATION_THRESHOLD = 1e-3


@dataclass(frozen=True)
class TimeGrid:
    """Uniform integration grid with snapshot stride."""

    t_max: float
    dt: float = 1e-3
    sample_every: int = 100

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigInvalid(f"dt must be positive, got {self.dt}")
        if self.t_max < self.dt:
            raise ConfigInvalid(f"t_max={self.t_max} smaller than dt={self.dt}")
        if self.sample_every < 1:
            raise ConfigInvalid(f"sample_every must be >= 1, got {self.sample_every}")

    @property
    def n_steps(self) -> int:
        exact = self.t_max / self.dt
        n = int(round(exact))
        if abs(n - exact) > 1e-9 * max(1.0, exact):
            n = int(np.floor(exact))
        return n

    @property
    def n_samples(self) -> int:
        return self.n_steps // self.sample_every + 1

    def times(self) -> np.ndarray:
        return self.dt * self.sample_every * np.arange(self.n_samples)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Sampled values on a uniform time grid.

    values is (n, k) real for observable columns, (n, dim) complex for
    state snapshots, or (n, dim, dim) complex for density matrices.
    """

    times: np.ndarray
    values: np.ndarray
    columns: tuple = None
    space: HilbertSpace = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", np.asarray(self.values))
        if len(t) != len(self.values):
            raise DimensionMismatch("times and values lengths differ")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def kind(self) -> str:
        if self.values.ndim == 3:
            return "density"
        return "states" if np.iscomplexobj(self.values) else "observables"

    def state(self, i: int) -> StateVector:
        return StateVector(self.space, self.values[i], normalized=False)

    def density(self, i: int) -> DensityMatrix:
        return DensityMatrix(self.space, self.values[i], validate=False)

    def column(self, name: str) -> np.ndarray:
        if self.columns is None or name not in self.columns:
            raise KeyError(f"no column {name!r} in {self.columns}")
        return self.values[:, self.columns.index(name)]

    def to_csv(self, path, provenance=None) -> None:
        """Write observable columns as CSV: header `t,<obs1>,...`.

        Floats are written with 17 significant digits. Optional provenance
        lines are prefixed with '#'.
        """
        if self.kind != "observables":
            raise ValueError("CSV export is defined for observable series")
        cols = self.columns or tuple(
            f"obs{i}" for i in range(self.values.shape[1])
        )
        lines = []
        if provenance:
            lines.extend(f"# {k}={v}" for k, v in provenance.items())
        lines.append(",".join(("t",) + tuple(cols)))
        for i, t in enumerate(self.times):
            row = [f"{t:.17g}"] + [f"{v:.17g}" for v in self.values[i]]
            lines.append(",".join(row))
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class LindbladSpec:
    """Collapse channels as (rate, operator kind) pairs.

    Built operators are C_i = √γ_i · O_i. With ``literal_amplitudes`` the
    prefactor is applied as-is (C_i = γ_i · O_i), the literal reading of a
    collapse operator written as a frequency times an operator; kept as a
    sensitivity switch.
    """

    collapse: tuple = field(default_factory=tuple)
    literal_amplitudes: bool = False

    def __post_init__(self):
        object.__setattr__(self, "collapse", tuple(tuple(c) for c in self.collapse))
        for rate, kind in self.collapse:
            if rate < 0:
                raise ConfigInvalid(f"collapse rate must be >= 0, got {rate}")

    def build(self, space: HilbertSpace) -> list:
        """Dense collapse matrices on the composite space."""
        out = []
        for rate, kind in self.collapse:
            op = build_operator(space, kind).matrix
            pref = rate if self.literal_amplitudes else np.sqrt(rate)
            out.append(pref * op)
        return out

    def to_json(self) -> dict:
        return {
            "collapse": [[rate, kind] for rate, kind in self.collapse],
            "literal_amplitudes": self.literal_amplitudes,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LindbladSpec":
        return cls(
            collapse=tuple((float(r), str(k)) for r, k in obj.get("collapse", ())),
            literal_amplitudes=bool(obj.get("literal_amplitudes", False)),
        )


def _h0_diag(params: ModelParams, space: HilbertSpace) -> np.ndarray:
    return np.real(np.diag(static_hamiltonian(params, space).matrix))


def evolve_schrodinger(
    params: ModelParams,
    space: HilbertSpace,
    psi0: StateVector,
    grid: TimeGrid,
    truncation_threshold: float = TRUNCATION_THRESHOLD,
) -> TimeSeries:
    """Integrate i dψ/dt = H(t)ψ and return state snapshots.

    Raises NormDriftExceeded if |‖ψ(t_max)‖ - 1| ≥ 1e-8 and attaches a
    TruncationWarning when the cutoff-state population crosses the
    monitoring threshold.
    """
    if psi0.space != space:
        raise DimensionMismatch("initial state lives on a different space")
    h0 = _h0_diag(params, space)
    v = coupling_operator(space, params.variant).matrix
    vdata, vind, vptr = _kernels.csr_parts(v)
    snaps, psi_final = _kernels.rk4_state(
        h0, vdata, vind, vptr, params.g0, params.omega_d,
        psi0.amplitudes, grid.dt, grid.n_steps, grid.sample_every,
    )
    drift = abs(np.linalg.norm(psi_final) - 1.0)
    if drift > NORM_DRIFT_TOL:
        raise NormDriftExceeded(
            f"norm drift {drift:.2e} exceeds {NORM_DRIFT_TOL}; reduce dt"
        )
    series = TimeSeries(grid.times(), snaps, space=space)
    cut = build_operator(space, "cutoff_projector").matrix
    cut_pop = np.real(np.einsum("ti,ij,tj->t", snaps.conj(), cut, snaps))
    if cut_pop.max() > truncation_threshold:
        warnings.warn(
            f"cutoff-state population reached {cut_pop.max():.2e} "
            f"(threshold {truncation_threshold}); increase fock_cutoff",
            TruncationWarning,
            stacklevel=2,
        )
    return series


def evolve_lindblad(
    params: ModelParams,
    space: HilbertSpace,
    rho0: DensityMatrix,
    lspec: LindbladSpec,
    grid: TimeGrid,
) -> TimeSeries:
    """Integrate dρ/dt = -i[H(t),ρ] + Σ_i D[C_i]ρ and return ρ snapshots.

    Enforces trace drift < 1e-6, hermiticity drift < 1e-8 and snapshot
    positivity (min eigenvalue > -1e-6).
    """
    if rho0.space != space:
        raise DimensionMismatch("initial density matrix lives on a different space")
    h0 = _h0_diag(params, space)
    v = coupling_operator(space, params.variant).matrix
    vdata, vind, vptr = _kernels.csr_parts(v)
    cs = lspec.build(space)
    if not cs:
        cs = [np.zeros((space.total_dim, space.total_dim), np.complex128)]
    c_data, c_ind, c_ptr2 = _kernels.csr_stack(cs)
    cd_data, cd_ind, cd_ptr2 = _kernels.csr_stack([c.conj().T for c in cs])
    dd_data, dd_ind, dd_ptr2 = _kernels.csr_stack([c.conj().T @ c for c in cs])
    snaps, rho_final = _kernels.rk4_lindblad_rho(
        h0, vdata, vind, vptr, params.g0, params.omega_d,
        c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
        dd_data, dd_ind, dd_ptr2, len(cs),
        rho0.matrix, grid.dt, grid.n_steps, grid.sample_every,
    )
    tr_drift = abs(complex(np.trace(rho_final)) - 1.0)
    if tr_drift > TRACE_DRIFT_TOL:
        raise TraceDriftExceeded(
            f"trace drift {tr_drift:.2e} exceeds {TRACE_DRIFT_TOL}; reduce dt"
        )
    herm_drift = max(
        np.max(np.abs(snaps[i] - snaps[i].conj().T)) for i in range(len(snaps))
    )
    if herm_drift > HERMITICITY_DRIFT_TOL:
        raise TraceDriftExceeded(
            f"hermiticity drift {herm_drift:.2e} exceeds {HERMITICITY_DRIFT_TOL}"
        )
    for i in range(len(snaps)):
        w_min = np.linalg.eigvalsh(0.5 * (snaps[i] + snaps[i].conj().T)).min()
        if w_min < -POSITIVITY_TOL:
            raise PositivityViolation(
                f"eigenvalue {w_min:.2e} at t={grid.times()[i]:g} "
                f"below -{POSITIVITY_TOL}"
            )
    return TimeSeries(grid.times(), snaps, space=space)


def observables_series(states: TimeSeries, ops) -> TimeSeries:
    """Expectation-value columns ⟨O⟩(t) for state or density series."""
    if states.space is None:
        raise DimensionMismatch("series carries no space information")
    labels = []
    mats = []
    for op in ops:
        if not isinstance(op, Operator):
            raise TypeError(f"expected Operator, got {type(op)}")
        if op.space != states.space:
            raise DimensionMismatch("operator space differs from series space")
        labels.append(op.label or f"op{len(labels)}")
        mats.append(op.matrix)
    vals = np.empty((len(states), len(mats)))
    if states.kind == "states":
        for k, m in enumerate(mats):
            vals[:, k] = np.real(
                np.einsum("ti,ij,tj->t", states.values.conj(), m, states.values)
            )
    elif states.kind == "density":
        for k, m in enumerate(mats):
            vals[:, k] = np.real(np.einsum("ij,tji->t", m, states.values))
    else:
        raise DimensionMismatch("series does not hold states or density matrices")
    return TimeSeries(states.times, vals, columns=tuple(labels), space=states.space)


@dataclass(frozen=True)
class TruncationReport:
    max_cutoff_population: float
    first_violation_time: float = None
    threshold: float = TRUNCATION_THRESHOLD

    @property
    def violated(self) -> bool:
        return self.first_violation_time is not None


def validate_truncation(
    states: TimeSeries, space: HilbertSpace, threshold: float = TRUNCATION_THRESHOLD
) -> TruncationReport:
    """Monitor the population of the cutoff Fock state |n_max⟩ over a run."""
    if not 0 < threshold < 1:
        raise ConfigInvalid(f"threshold must be in (0,1), got {threshold}")
    if states.space != space:
        raise DimensionMismatch("series space differs from the given space")
    cut = build_operator(space, "cutoff_projector").matrix
    if states.kind == "states":
        pop = np.real(
            np.einsum("ti,ij,tj->t", states.values.conj(), cut, states.values)
        )
    else:
        pop = np.real(np.einsum("ij,tji->t", cut, states.values))
    above = np.nonzero(pop > threshold)[0]
    first = float(states.times[above[0]]) if len(above) else None
    return TruncationReport(
        max_cutoff_population=float(pop.max()),
        first_violation_time=first,
        threshold=threshold,
    )


def max_over_time(series: TimeSeries) -> float:
    """Maximum sampled value of a single-column observable series."""
    if len(series) == 0:
        raise EmptySeries("cannot reduce an empty series")
    if series.kind != "observables":
        raise ValueError("max_over_time reduces observable series")
    return float(series.values.max())
