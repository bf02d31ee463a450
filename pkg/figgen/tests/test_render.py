import numpy as np
import pytest

from figgen import MalformedCSV, PlotSpec, render
from figgen.cli import main


def write_time_matrix(path, n_t=40, n_axis=12):
    t = np.linspace(0, 200, n_t)
    wd = np.linspace(0, 3, n_axis)
    lines = ["# observables=number", "# preset=fig2", "# rows=t", "# cols=omega_d"]
    lines.append(",".join(["t\\omega_d"] + [f"{v:.17g}" for v in wd]))
    for tk in t:
        row = np.exp(-((wd - 1.0) ** 2) / 0.1) * (tk / 200) ** 2
        lines.append(",".join([f"{tk:.17g}"] + [f"{v:.17g}" for v in row]))
    path.write_text("\n".join(lines) + "\n")


def write_param_matrix(path, n0=10, n1=11):
    om = np.linspace(0.2, 3, n0)
    wd = np.linspace(0.2, 3, n1)
    lines = ["# observables=number", "# preset=fig4", "# rows=Omega", "# cols=omega_d"]
    lines.append(",".join(["Omega\\omega_d"] + [f"{v:.17g}" for v in wd]))
    for o in om:
        row = 1.0 / (1.0 + 10 * (wd - 1.0) ** 2) / o
        lines.append(",".join([f"{o:.17g}"] + [f"{v:.17g}" for v in row]))
    path.write_text("\n".join(lines) + "\n")


def test_render_time_heatmap(tmp_path):
    csv = tmp_path / "fig2.csv"
    write_time_matrix(csv)
    out = tmp_path / "fig2.png"
    render(PlotSpec(str(csv), "heatmap_time_axis", str(out)))
    blob = out.read_bytes()
    assert blob[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(blob) > 5000


def test_render_param_heatmap(tmp_path):
    csv = tmp_path / "fig4.csv"
    write_param_matrix(csv)
    out = tmp_path / "fig4.png"
    render(PlotSpec(str(csv), "heatmap_param_axes", str(out), vmin=0.0, vmax=2.0))
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_lineplot(tmp_path):
    csv = tmp_path / "run.csv"
    t = np.linspace(0, 10, 101)
    lines = ["t,N,Sz"]
    for tk in t:
        lines.append(f"{tk:.17g},{(tk/10)**2:.17g},{-0.5 + 0.01*np.sin(tk):.17g}")
    csv.write_text("\n".join(lines) + "\n")
    out = tmp_path / "run.png"
    render(PlotSpec(str(csv), "lineplot", str(out)))
    assert out.exists()


def test_render_deterministic(tmp_path):
    csv = tmp_path / "fig4.csv"
    write_param_matrix(csv)
    blobs = []
    for name in ("r1.png", "r2.png"):
        out = tmp_path / name
        render(PlotSpec(str(csv), "heatmap_param_axes", str(out), vmin=0.0, vmax=5.0))
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


def test_render_handles_nan_cells(tmp_path):
    csv = tmp_path / "nan.csv"
    lines = ["Omega\\omega_d,0.5,1.0", "0.5,0.1,nan", "1.0,0.2,0.3"]
    csv.write_text("\n".join(lines) + "\n")
    out = tmp_path / "nan.png"
    render(PlotSpec(str(csv), "heatmap_param_axes", str(out)))
    assert out.exists()


def test_kind_layout_mismatch(tmp_path):
    csv = tmp_path / "fig4.csv"
    write_param_matrix(csv)
    with pytest.raises(MalformedCSV):
        render(PlotSpec(str(csv), "heatmap_time_axis", str(tmp_path / "x.png")))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        PlotSpec("in.csv", "scatter3d", "out.png")


def test_cli_success(tmp_path):
    csv = tmp_path / "fig2.csv"
    write_time_matrix(csv)
    out = tmp_path / "cli.png"
    rc = main([str(csv), "--kind", "heatmap_time_axis", "--out", str(out)])
    assert rc == 0
    assert out.exists()


def test_cli_malformed_input_nonzero(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    rc = main([str(empty), "--kind", "lineplot", "--out", str(tmp_path / "x.png")])
    assert rc == 1
