"""Parameter-sweep engine, figure-data presets, deterministic file output.

Sweeps evolve one cell per grid point from |g,0⟩ (pure or Lindblad),
recording diagonal observables. Cells are independent and are parallelized
across threads; results are assembled by cell index, so output is
deterministic regardless of scheduling. A failing cell is flagged NaN and
logged to a sidecar file instead of aborting the run. Files are written
atomically (temp + rename) with a '#'-prefixed provenance header.

CSV layouts
-----------
- 2-axis reduced sweep: matrix; header row holds axis-1 values (first cell
  "axis0\\axis1"), first column holds axis-0 values.
- 1-axis full-series sweep: matrix; header row holds axis values (first
  cell "t\\axis"), first column holds sample times.
- 1-axis reduced sweep: columns "axis,<obs>,..." one row per grid point.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numba
import numpy as np

from . import __version__
from . import _kernels
from .dynamics import LindbladSpec, TimeGrid, max_over_time  # noqa: F401
from .errors import ConfigInvalid
from .model import ModelParams, coupling_operator
from .qspace import build_operator

AXIS_NAMES = ("omega_d", "Omega", "g0")
# observables a sweep can record: rely on these being diagonal in the
# qubit-major product basis
DIAGONAL_OBSERVABLES = ("number", "s_z", "cutoff_projector", "identity")
REDUCTIONS = ("none", "max_over_time")

NORM_DRIFT_TOL = 1e-8
TRACE_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: linspace(start, stop, steps)."""

    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigInvalid(f"axis {self.name!r} not one of {AXIS_NAMES}")
        if self.steps < 2:
            raise ConfigInvalid(f"axis {self.name!r} needs steps >= 2")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    axes: tuple
    base: ModelParams
    grid: TimeGrid
    observables: tuple = ("number",)
    reduction: str = "max_over_time"
    lindblad: LindbladSpec = None
    out: str = None
    name: str = None

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "observables", tuple(self.observables))
        if not 1 <= len(axes) <= 2:
            raise ConfigInvalid("sweeps support 1 or 2 axes")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ConfigInvalid(f"axis names must be distinct, got {names}")
        if self.reduction not in REDUCTIONS:
            raise ConfigInvalid(f"reduction {self.reduction!r} not in {REDUCTIONS}")
        if self.reduction == "none" and len(axes) != 1:
            raise ConfigInvalid("reduction 'none' is only defined for 1 axis")
        if self.reduction == "none" and len(self.observables) != 1:
            raise ConfigInvalid("full-series sweeps record exactly one observable")
        if len(axes) == 2 and len(self.observables) != 1:
            raise ConfigInvalid("2-axis sweeps record exactly one observable")
        if not self.observables:
            raise ConfigInvalid("at least one observable required")
        for obs in self.observables:
            if obs not in DIAGONAL_OBSERVABLES:
                raise ConfigInvalid(
                    f"observable {obs!r} not sweepable; one of {DIAGONAL_OBSERVABLES}"
                )

    def to_json(self) -> dict:
        return {
            "axes": [
                {"name": a.name, "start": a.start, "stop": a.stop, "steps": a.steps}
                for a in self.axes
            ],
            "params": self.base.to_json(),
            "grid": {
                "t_max": self.grid.t_max,
                "dt": self.grid.dt,
                "sample_every": self.grid.sample_every,
            },
            "observables": list(self.observables),
            "reduction": self.reduction,
            "lindblad": self.lindblad.to_json() if self.lindblad else None,
            "out": self.out,
            "name": self.name,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SweepConfig":
        try:
            axes = tuple(
                AxisSpec(
                    name=str(a["name"]),
                    start=float(a["start"]),
                    stop=float(a["stop"]),
                    steps=int(a["steps"]),
                )
                for a in obj["axes"]
            )
            grid = TimeGrid(
                t_max=float(obj["grid"]["t_max"]),
                dt=float(obj["grid"].get("dt", 1e-3)),
                sample_every=int(obj["grid"].get("sample_every", 100)),
            )
            lind = obj.get("lindblad")
            return cls(
                axes=axes,
                base=ModelParams.from_json(obj["params"]),
                grid=grid,
                observables=tuple(obj.get("observables", ("number",))),
                reduction=str(obj.get("reduction", "max_over_time")),
                lindblad=LindbladSpec.from_json(lind) if lind else None,
                out=obj.get("out"),
                name=obj.get("name"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigInvalid(f"bad sweep config: {e}") from e


@dataclass(frozen=True, eq=False)
class SweepResult:
    config: SweepConfig
    axes: dict  # name -> values array
    data: np.ndarray
    # reduced 1-axis: (steps, nobs); reduced 2-axis: (steps0, steps1);
    # full series: (n_samples, steps)
    times: np.ndarray = None
    errors: tuple = ()
    provenance: dict = field(default_factory=dict)

    def to_csv(self, path=None) -> str:
        path = path or self.config.out
        if path is None:
            raise ConfigInvalid("no output path configured")
        lines = [f"# {k}={v}" for k, v in self.provenance.items()]
        cfg = self.config
        fmt = lambda x: f"{x:.17g}"  # noqa: E731
        if cfg.reduction == "none":
            axis = cfg.axes[0]
            vals = self.axes[axis.name]
            lines.append(
                ",".join([f"t\\{axis.name}"] + [fmt(v) for v in vals])
            )
            for i, t in enumerate(self.times):
                lines.append(",".join([fmt(t)] + [fmt(v) for v in self.data[i]]))
        elif len(cfg.axes) == 2:
            a0, a1 = cfg.axes
            v0, v1 = self.axes[a0.name], self.axes[a1.name]
            lines.append(
                ",".join([f"{a0.name}\\{a1.name}"] + [fmt(v) for v in v1])
            )
            for i, row_val in enumerate(v0):
                lines.append(
                    ",".join([fmt(row_val)] + [fmt(v) for v in self.data[i]])
                )
        else:
            axis = cfg.axes[0]
            lines.append(",".join([axis.name] + list(cfg.observables)))
            for i, v in enumerate(self.axes[axis.name]):
                lines.append(",".join([fmt(v)] + [fmt(x) for x in self.data[i]]))
        _atomic_write(path, "\n".join(lines) + "\n")
        if self.errors:
            log = "\n".join(f"cell {idx}: {msg}" for idx, msg in self.errors)
            _atomic_write(str(path) + ".errors.log", log + "\n")
        return str(path)

    def to_json_file(self, path) -> str:
        obj = {
            "provenance": self.provenance,
            "axes": {k: list(map(float, v)) for k, v in self.axes.items()},
            "data": np.where(np.isnan(self.data), None, self.data).tolist(),
        }
        if self.times is not None:
            obj["times"] = list(map(float, self.times))
        if self.errors:
            obj["errors"] = [[int(i), str(m)] for i, m in self.errors]
        _atomic_write(path, json.dumps(obj, indent=1) + "\n")
        return str(path)


def _atomic_write(path, text: str) -> None:
    path = str(path)
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp, path)


def _provenance(config: SweepConfig) -> dict:
    # no timestamps, no output path: the header stays byte-identical
    # across reruns regardless of where the file lands
    cfg_echo = config.to_json()
    cfg_echo.pop("out", None)
    prov = {
        "generator": f"dcesim {__version__}",
        "config": json.dumps(cfg_echo, sort_keys=True),
        "dt": f"{config.grid.dt:.17g}",
        "t_max": f"{config.grid.t_max:.17g}",
        "reduction": config.reduction,
        "observables": ",".join(config.observables),
    }
    if config.name:
        prov["preset"] = config.name
    if len(config.axes) == 2:
        prov["rows"] = config.axes[0].name
        prov["cols"] = config.axes[1].name
    elif config.reduction == "none":
        prov["rows"] = "t"
        prov["cols"] = config.axes[0].name
    return prov


def _cell_params(config: SweepConfig):
    """Per-cell (Omega, omega_d, g0) arrays, row-major over the axis grid."""
    base = config.base
    if len(config.axes) == 1:
        grids = [config.axes[0].values()]
        mesh = [grids[0]]
    else:
        v0 = config.axes[0].values()
        v1 = config.axes[1].values()
        m0, m1 = np.meshgrid(v0, v1, indexing="ij")
        mesh = [m0.ravel(), m1.ravel()]
    n_cells = len(mesh[0])
    fields = {
        "Omega": np.full(n_cells, base.Omega),
        "omega_d": np.full(n_cells, base.omega_d),
        "g0": np.full(n_cells, base.g0),
    }
    for axis, values in zip(config.axes, mesh):
        fields[axis.name] = np.asarray(values, dtype=float)
    return fields["Omega"], fields["omega_d"], fields["g0"]


def run_sweep(config: SweepConfig, threads: int = None) -> SweepResult:
    """Evolve every grid cell and assemble the reduced/full observables.

    threads limits the worker pool (1 forces sequential execution); cells
    that fail their integrity check are NaN-flagged and reported in
    result.errors rather than aborting.
    """
    space = config.base.space()
    dim = space.total_dim
    omegas, wds, g0s = _cell_params(config)
    n_cells = len(wds)

    n_diag = np.real(np.diag(build_operator(space, "number").matrix))
    sz_diag = np.real(np.diag(build_operator(space, "s_z").matrix))
    h0_cells = config.base.omega * n_diag[None, :] + np.outer(omegas, sz_diag)

    v = coupling_operator(space, config.base.variant).matrix
    vdata, vind, vptr = _kernels.csr_parts(v)
    obs_diag = np.stack(
        [np.real(np.diag(build_operator(space, o).matrix)) for o in config.observables]
    )
    grid = config.grid
    reduce_max = config.reduction == "max_over_time"

    old_threads = numba.get_num_threads()
    if threads is not None:
        if threads < 1:
            raise ConfigInvalid(f"threads must be >= 1, got {threads}")
        numba.set_num_threads(min(threads, old_threads))
    try:
        if config.lindblad is None:
            psi0 = np.zeros(dim, np.complex128)
            psi0[0] = 1.0
            series, reduced, final_norm = _kernels.rk4_cells_obs(
                h0_cells, vdata, vind, vptr, g0s, wds, psi0, obs_diag,
                grid.dt, grid.n_steps, grid.sample_every, reduce_max,
            )
            drift = np.abs(final_norm - 1.0)
            bad = drift > NORM_DRIFT_TOL
            err_what = "norm drift"
        else:
            cs = config.lindblad.build(space)
            if not cs:
                cs = [np.zeros((dim, dim), np.complex128)]
            c_data, c_ind, c_ptr2 = _kernels.csr_stack(cs)
            cd_data, cd_ind, cd_ptr2 = _kernels.csr_stack([c.conj().T for c in cs])
            dd_data, dd_ind, dd_ptr2 = _kernels.csr_stack(
                [c.conj().T @ c for c in cs]
            )
            rho0 = np.zeros((dim, dim), np.complex128)
            rho0[0, 0] = 1.0
            series, reduced, trace_dev = _kernels.rk4_lindblad_cells_obs(
                h0_cells, vdata, vind, vptr, g0s, wds,
                c_data, c_ind, c_ptr2, cd_data, cd_ind, cd_ptr2,
                dd_data, dd_ind, dd_ptr2, len(cs),
                rho0, obs_diag, grid.dt, grid.n_steps, grid.sample_every,
                reduce_max,
            )
            drift = trace_dev
            bad = drift > TRACE_DRIFT_TOL
            err_what = "trace drift"
    finally:
        numba.set_num_threads(old_threads)

    errors = tuple(
        (int(m), f"{err_what} {drift[m]:.3e} exceeds tolerance")
        for m in np.nonzero(bad)[0]
    )
    if reduce_max:
        reduced = reduced.copy()
        reduced[bad] = np.nan
    else:
        series = series.copy()
        series[bad] = np.nan

    axes = {a.name: a.values() for a in config.axes}
    times = None
    if config.reduction == "none":
        data = series[:, :, 0].T  # (n_samples, steps)
        times = grid.times()
    elif len(config.axes) == 2:
        data = reduced[:, 0].reshape(config.axes[0].steps, config.axes[1].steps)
    else:
        data = reduced  # (steps, nobs)
    if not np.all(np.isfinite(data)) and not errors:
        raise FloatingPointError("non-finite sweep cells without error flags")
    return SweepResult(
        config=config,
        axes=axes,
        data=data,
        times=times,
        errors=errors,
        provenance=_provenance(config),
    )


# --- figure-data presets ----------------------------------------------------

_LINDBLAD_APPENDIX = LindbladSpec(collapse=((0.025, "a"), (0.025, "sigma_minus")))


def _preset_base(**kw) -> ModelParams:
    defaults = dict(Omega=1.0, omega_d=1.0, g0=0.1, fock_cutoff=7)
    defaults.update(kw)
    return ModelParams(**defaults)


def preset_config(
    name: str,
    steps: int = None,
    t_max: float = 200.0,
    dt: float = 1e-3,
    sample_every: int = 100,
    fock_cutoff: int = 7,
    out: str = None,
) -> SweepConfig:
    """Named sweep configurations behind the figure datasets.

    Time/parameter heatmaps (fig2, fig3, figA1 and the dissipative
    figC1-C3) sweep the driving frequency ω_d ∈ [0, 3ω] with the qubit
    resonant (Ω = ω); fig4/figA2 sweep Ω × ω_d ∈ [0.2ω, 3ω]² and reduce
    to the maximum over ωt ∈ [0, t_max]. Axis ranges follow the package
    defaults and are override-friendly (steps, t_max, dt, fock_cutoff).
    """
    grid = TimeGrid(t_max=t_max, dt=dt, sample_every=sample_every)
    line = lambda s: (AxisSpec("omega_d", 0.0, 3.0, s or 121),)  # noqa: E731
    plane = lambda s: (  # noqa: E731
        AxisSpec("Omega", 0.2, 3.0, s or 121),
        AxisSpec("omega_d", 0.2, 3.0, s or 121),
    )
    builders = {
        "fig2": lambda: SweepConfig(
            axes=line(steps),
            base=_preset_base(fock_cutoff=fock_cutoff),
            grid=grid, observables=("number",), reduction="none",
        ),
        "fig3": lambda: SweepConfig(
            axes=line(steps),
            base=_preset_base(fock_cutoff=fock_cutoff),
            grid=grid, observables=("s_z",), reduction="none",
        ),
        "fig4": lambda: SweepConfig(
            axes=plane(steps),
            base=_preset_base(fock_cutoff=fock_cutoff),
            grid=grid, observables=("number",), reduction="max_over_time",
        ),
        "figA1": lambda: SweepConfig(
            axes=line(steps),
            base=_preset_base(fock_cutoff=fock_cutoff),
            grid=grid, observables=("cutoff_projector",), reduction="none",
        ),
        "figA2": lambda: SweepConfig(
            axes=plane(steps),
            base=_preset_base(fock_cutoff=fock_cutoff),
            grid=grid, observables=("cutoff_projector",), reduction="max_over_time",
        ),
        "figC1": lambda: SweepConfig(
            axes=line(steps),
            base=_preset_base(g0=0.025, fock_cutoff=fock_cutoff),
            grid=grid, observables=("number",), reduction="none",
            lindblad=_LINDBLAD_APPENDIX,
        ),
        "figC2": lambda: SweepConfig(
            axes=line(steps),
            base=_preset_base(g0=0.025, fock_cutoff=fock_cutoff),
            grid=grid, observables=("s_z",), reduction="none",
            lindblad=_LINDBLAD_APPENDIX,
        ),
        "figC3": lambda: SweepConfig(
            axes=line(steps),
            base=_preset_base(g0=0.025, fock_cutoff=fock_cutoff),
            grid=grid, observables=("cutoff_projector",), reduction="none",
            lindblad=_LINDBLAD_APPENDIX,
        ),
    }
    if name not in builders:
        raise ConfigInvalid(f"unknown preset {name!r}; one of {sorted(builders)}")
    cfg = builders[name]()
    object.__setattr__(cfg, "name", name)
    object.__setattr__(cfg, "out", out)
    return cfg


PRESET_NAMES = ("fig2", "fig3", "fig4", "figA1", "figA2", "figC1", "figC2", "figC3")
