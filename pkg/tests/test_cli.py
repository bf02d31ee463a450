import json

import numpy as np
import pytest

from dcesim.cli import main


def read_csv_columns(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(x) for x in l.split(",")] for l in lines[1:]])
    return header, data


def test_evolve_writes_three_column_csv(tmp_path):
    out = tmp_path / "run.csv"
    rc = main([
        "evolve", "--omega-d", "1.0", "--qubit-freq", "1.0", "--g0", "0.1",
        "--t-max", "5", "--out", str(out),
    ])
    assert rc == 0
    header, data = read_csv_columns(out)
    assert header == ["t", "N", "Sz"]
    assert data.shape == (51, 3)
    assert data[0, 1] == 0.0
    assert data[0, 2] == -0.5


def test_evolve_zero_coupling_zero_photons(tmp_path):
    out = tmp_path / "zero.csv"
    rc = main(["evolve", "--g0", "0", "--t-max", "3", "--out", str(out)])
    assert rc == 0
    _, data = read_csv_columns(out)
    assert np.all(data[:, 1] == 0.0)


def test_evolve_stdout(capsys):
    rc = main(["evolve", "--g0", "0", "--t-max", "1"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t,N,Sz"
    assert len(lines) == 12


def test_bad_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["evolve", "--variant", "bogus", "--t-max", "1"])
    assert exc.value.code == 2


def test_config_error_exits_2(tmp_path):
    rc = main(["evolve", "--g0", "-1", "--t-max", "1"])
    assert rc == 2
    rc = main(["evolve", "--fock-cutoff", "0", "--t-max", "1"])
    assert rc == 2


def test_validation_failure_exits_1():
    # a step far too large for the spectrum trips the norm-drift check
    rc = main(["evolve", "--t-max", "50", "--dt", "0.5", "--sample-every", "10"])
    assert rc == 1


def test_lindblad_subcommand(tmp_path):
    out = tmp_path / "lind.csv"
    rc = main([
        "lindblad", "--g0", "0.025", "--gamma-a", "0.025", "--gamma-q", "0.025",
        "--t-max", "3", "--out", str(out),
    ])
    assert rc == 0
    header, data = read_csv_columns(out)
    assert header == ["t", "N", "Sz"]
    assert np.all(data[:, 1] >= -1e-12)


def test_dyson_subcommand(tmp_path, capsys):
    out = tmp_path / "secular.csv"
    rc = main(["dyson", "--t-max", "40", "--order", "2", "--out", str(out)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "secular components" in printed
    assert "|g,2⟩" in printed
    lines = out.read_text().splitlines()
    assert lines[0] == "qubit,photons,order,slope_re,slope_im,residual,class"


def test_preset_subcommand_and_determinism(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    for out in (out1, out2):
        rc = main([
            "preset", "fig4", "--steps", "3", "--t-max", "2",
            "--out", str(out),
        ])
        assert rc == 0
    assert out1.read_bytes() == out2.read_bytes()
    body = [l for l in out1.read_text().splitlines() if not l.startswith("#")]
    assert body[0].startswith("Omega\\omega_d,")


def test_preset_rejects_unknown():
    with pytest.raises(SystemExit) as exc:
        main(["preset", "fig99"])
    assert exc.value.code == 2


def test_sweep_subcommand_from_json(tmp_path):
    cfg = {
        "axes": [{"name": "omega_d", "start": 0.5, "stop": 1.5, "steps": 3}],
        "params": {
            "omega": 1.0, "Omega": 1.0, "omega_d": 1.0, "g0": 0.05,
            "L": 1.0, "variant": "full", "fock_cutoff": 5,
        },
        "grid": {"t_max": 2.0, "dt": 1e-3, "sample_every": 100},
        "observables": ["number"],
        "reduction": "max_over_time",
    }
    cfg_path = tmp_path / "sweep.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "sweep.csv"
    json_out = tmp_path / "sweep_out.json"
    rc = main([
        "sweep", "--config", str(cfg_path), "--out", str(out),
        "--json-out", str(json_out),
    ])
    assert rc == 0
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert body[0] == "omega_d,number"
    assert len(body) == 4
    mirror = json.loads(json_out.read_text())
    assert mirror["axes"]["omega_d"] == [0.5, 1.0, 1.5]


def test_sweep_bad_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["sweep", "--config", str(bad)]) == 2
    missing = tmp_path / "missing.json"
    assert main(["sweep", "--config", str(missing)]) == 2
    noaxes = tmp_path / "noaxes.json"
    noaxes.write_text(json.dumps({"axes": []}))
    assert main(["sweep", "--config", str(noaxes)]) == 2


def test_validate_rejects_unknown_ids():
    assert main(["validate", "--only", "11"]) == 2
    assert main(["validate", "--only", "x"]) == 2


def test_validate_single_quick_criterion(capsys):
    rc = main(["validate", "--only", "6"])
    out = capsys.readouterr().out
    assert "criterion  6: PASS" in out
    assert rc == 0
