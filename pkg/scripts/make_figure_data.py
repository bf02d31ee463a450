#!/usr/bin/env python3
"""Generate every preset dataset and, when figgen is installed, render it.

Full-resolution presets take a while (the two-parameter maps integrate
~14k Schrödinger evolutions to ωt = 200); pass --steps/--t-max for a
quick look.
"""

import argparse
import shutil
import subprocess
from pathlib import Path

from dcesim.sweep import PRESET_NAMES, preset_config, run_sweep

HEATMAP_KIND = {
    "fig2": "heatmap_time_axis",
    "fig3": "heatmap_time_axis",
    "fig4": "heatmap_param_axes",
    "figA1": "heatmap_time_axis",
    "figA2": "heatmap_param_axes",
    "figC1": "heatmap_time_axis",
    "figC2": "heatmap_time_axis",
    "figC3": "heatmap_time_axis",
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="figure_data", type=Path)
    ap.add_argument("--steps", type=int, default=None,
                    help="override axis resolution (default: preset values)")
    ap.add_argument("--t-max", type=float, default=200.0)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--only", nargs="*", choices=PRESET_NAMES, default=None)
    ap.add_argument("--render", action="store_true",
                    help="also render PNGs via figgen (must be installed)")
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    names = args.only or PRESET_NAMES
    for name in names:
        out = args.out_dir / f"{name}.csv"
        cfg = preset_config(name, steps=args.steps, t_max=args.t_max, out=str(out))
        print(f"[{name}] running {cfg.axes[0].steps}"
              + (f"x{cfg.axes[1].steps}" if len(cfg.axes) == 2 else "")
              + f" cells to ωt={args.t_max:g} ...", flush=True)
        result = run_sweep(cfg, threads=args.threads)
        result.to_csv()
        print(f"[{name}] wrote {out}"
              + (f" ({len(result.errors)} flagged cells)" if result.errors else ""))
        if args.render:
            if shutil.which("figgen") is None:
                print("figgen not installed; skipping render")
                continue
            png = out.with_suffix(".png")
            subprocess.run(
                ["figgen", str(out), "--kind", HEATMAP_KIND[name],
                 "--out", str(png)],
                check=True,
            )
            print(f"[{name}] wrote {png}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
