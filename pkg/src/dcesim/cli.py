"""Command-line interface.

Subcommands: evolve (single run → CSV), lindblad (dissipative run),
dyson (corrections + secular report), sweep (JSON config → CSV matrix),
preset (named figure datasets), validate (acceptance criteria).
Exit codes: 0 success, 1 validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dynamics import (
    LindbladSpec,
    TimeGrid,
    evolve_lindblad,
    evolve_schrodinger,
    observables_series,
)
from .dyson import classify_all, dyson_corrections, reconstruct_and_compare, reports_to_csv
from .errors import (
    ConfigInvalid,
    DceSimError,
    NonPositiveCutoff,
    OrderOutOfRange,
)
from .model import ModelParams
from .qspace import DensityMatrix, build_operator, ground_state
from .sweep import PRESET_NAMES, SweepConfig, preset_config, run_sweep

_CONFIG_ERRORS = (ConfigInvalid, NonPositiveCutoff, OrderOutOfRange)


def _add_model_flags(p: argparse.ArgumentParser, g0_default=0.1):
    p.add_argument("--omega-d", type=float, default=1.0,
                   help="driving frequency in units of the mode frequency")
    p.add_argument("--qubit-freq", type=float, default=1.0,
                   help="qubit frequency Ω in units of the mode frequency")
    p.add_argument("--g0", type=float, default=g0_default,
                   help="coupling amplitude in units of the mode frequency")
    p.add_argument("--fock-cutoff", type=int, default=7,
                   help="largest retained photon number")
    p.add_argument("--variant", choices=("full", "rwa", "anti_rwa"),
                   default="full", help="coupling-term selection")


def _add_grid_flags(p: argparse.ArgumentParser, t_max=200.0):
    p.add_argument("--t-max", type=float, default=t_max,
                   help="evolution time in units of 1/ω")
    p.add_argument("--dt", type=float, default=1e-3, help="integrator step")
    p.add_argument("--sample-every", type=int, default=100,
                   help="snapshot stride in integrator steps")


def _params(args) -> ModelParams:
    return ModelParams(
        Omega=args.qubit_freq,
        omega_d=args.omega_d,
        g0=args.g0,
        fock_cutoff=args.fock_cutoff,
        variant=getattr(args, "variant", "full"),
    )


def _grid(args) -> TimeGrid:
    return TimeGrid(t_max=args.t_max, dt=args.dt, sample_every=args.sample_every)


def _emit(series, out):
    if out:
        series.to_csv(out, provenance={"generator": f"dcesim {__version__}"})
        print(f"wrote {out}")
    else:
        print(",".join(("t",) + series.columns))
        for i, t in enumerate(series.times):
            print(",".join([f"{t:.17g}"] + [f"{v:.17g}" for v in series.values[i]]))


def cmd_evolve(args) -> int:
    params = _params(args)
    space = params.space()
    series = evolve_schrodinger(params, space, ground_state(space), _grid(args))
    obs = observables_series(
        series,
        [build_operator(space, "number"), build_operator(space, "s_z")],
    )
    obs = type(obs)(obs.times, obs.values, columns=("N", "Sz"), space=space)
    _emit(obs, args.out)
    return 0


def cmd_lindblad(args) -> int:
    params = _params(args)
    space = params.space()
    lspec = LindbladSpec(
        collapse=((args.gamma_a, "a"), (args.gamma_q, "sigma_minus")),
        literal_amplitudes=args.literal_amplitudes,
    )
    rho0 = DensityMatrix.from_state(ground_state(space))
    series = evolve_lindblad(params, space, rho0, lspec, _grid(args))
    obs = observables_series(
        series,
        [build_operator(space, "number"), build_operator(space, "s_z")],
    )
    obs = type(obs)(obs.times, obs.values, columns=("N", "Sz"), space=space)
    _emit(obs, args.out)
    return 0


def cmd_dyson(args) -> int:
    params = _params(args)
    space = params.space()
    grid = _grid(args)
    stack = dyson_corrections(params, space, ground_state(space), args.order, grid)
    reports = classify_all(stack)
    if args.out:
        reports_to_csv(reports, args.out)
        print(f"wrote {args.out}")
    secular = [r for r in reports if r.is_secular]
    print(f"secular components (orders 1..{args.order}):")
    if secular:
        for r in secular:
            print(
                f"  order {r.order}: |{'ge'[r.qubit]},{r.photons}⟩ "
                f"slope {r.slope:.5f} (|slope|={abs(r.slope):.5f})"
            )
    else:
        print("  none")
    full = evolve_schrodinger(params, space, ground_state(space), grid)
    resid = reconstruct_and_compare(stack, params.g0, full)
    print(
        f"reconstruction residual at g0={params.g0}: "
        f"max {resid.values.max():.3e} over ωt ≤ {grid.t_max:g}"
    )
    return 0


def cmd_sweep(args) -> int:
    with open(args.config, "r", encoding="utf-8") as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigInvalid(f"config is not valid JSON: {e}") from e
    cfg = SweepConfig.from_json(obj)
    result = run_sweep(cfg, threads=args.threads)
    out = args.out or cfg.out
    if out is None:
        raise ConfigInvalid("no output path: pass --out or set 'out' in the config")
    result.to_csv(out)
    print(f"wrote {out}" + (f" ({len(result.errors)} flagged cells)" if result.errors else ""))
    if args.json_out:
        result.to_json_file(args.json_out)
        print(f"wrote {args.json_out}")
    return 0


def cmd_preset(args) -> int:
    cfg = preset_config(
        args.name,
        steps=args.steps,
        t_max=args.t_max,
        dt=args.dt,
        fock_cutoff=args.fock_cutoff,
        out=args.out or f"{args.name}.csv",
    )
    result = run_sweep(cfg, threads=args.threads)
    path = result.to_csv()
    print(f"wrote {path}" + (f" ({len(result.errors)} flagged cells)" if result.errors else ""))
    if args.json_out:
        result.to_json_file(args.json_out)
        print(f"wrote {args.json_out}")
    return 0


def cmd_validate(args) -> int:
    from .acceptance import run_criteria

    only = None
    if args.only:
        try:
            only = sorted({int(x) for x in args.only.split(",")})
        except ValueError as e:
            raise ConfigInvalid(f"--only expects comma-separated ids: {e}") from e
        unknown = [i for i in only if not 1 <= i <= 10]
        if unknown:
            raise ConfigInvalid(f"unknown criteria {unknown}; valid ids are 1..10")
    results = run_criteria(only=only, threads=args.threads)
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return 1 if n_fail else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dcesim",
        description="Moving-qubit cavity QED simulator",
    )
    ap.add_argument("--version", action="version", version=f"dcesim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="single unitary run -> CSV (t,N,Sz)")
    _add_model_flags(p)
    _add_grid_flags(p)
    p.add_argument("--out", help="output CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("lindblad", help="dissipative run -> CSV (t,N,Sz)")
    _add_model_flags(p, g0_default=0.025)
    _add_grid_flags(p)
    p.add_argument("--gamma-a", type=float, default=0.025,
                   help="photon-loss rate (units of ω)")
    p.add_argument("--gamma-q", type=float, default=0.025,
                   help="qubit-relaxation rate (units of ω)")
    p.add_argument("--literal-amplitudes", action="store_true",
                   help="apply rates as literal collapse-operator prefactors")
    p.add_argument("--out", help="output CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_lindblad)

    p = sub.add_parser("dyson", help="perturbative corrections + secular report")
    _add_model_flags(p)
    _add_grid_flags(p, t_max=120.0)
    p.add_argument("--order", type=int, default=3, help="highest correction order (1..3)")
    p.add_argument("--out", help="secular-report CSV path")
    p.set_defaults(func=cmd_dyson)

    p = sub.add_parser("sweep", help="parameter sweep from a JSON config")
    p.add_argument("--config", required=True, help="sweep config JSON path")
    p.add_argument("--out", help="override the config's output path")
    p.add_argument("--json-out", help="also write a JSON mirror of the result")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="emit a named figure dataset")
    p.add_argument("name", choices=PRESET_NAMES)
    p.add_argument("--out", help="output CSV path (default <name>.csv)")
    p.add_argument("--json-out", help="also write a JSON mirror of the result")
    p.add_argument("--steps", type=int, default=None, help="override axis resolution")
    p.add_argument("--t-max", type=float, default=200.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--fock-cutoff", type=int, default=7)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("validate", help="run the acceptance criteria")
    p.add_argument("--only", help="comma-separated criterion ids (default all)")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DceSimError as e:
        print(f"validation failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
