import numpy as np
import pytest

from figgen import MalformedCSV, MissingColumns, parse_csv

MATRIX_TIME = """\
# generator=dcesim 0.1.0
# preset=fig2
# observables=number
# rows=t
# cols=omega_d
t\\omega_d,0,1.5,3
0,0,0,0
0.1,0.001,0.02,0.003
0.2,0.002,0.04,0.001
"""

MATRIX_PARAMS = """\
# rows=Omega
# cols=omega_d
Omega\\omega_d,0.2,1,3
0.2,0.1,2.2,0.3
1.0,0.05,1.05,0.2
"""

COLUMNS = """\
# generator=dcesim 0.1.0
t,N,Sz
0,0,-0.5
0.1,0.01,-0.499
"""


def test_parse_time_matrix(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text(MATRIX_TIME)
    parsed = parse_csv(p)
    assert parsed.layout == "matrix"
    assert parsed.rows_label == "t"
    assert parsed.cols_label == "omega_d"
    assert parsed.provenance["preset"] == "fig2"
    assert list(parsed.col_values) == [0.0, 1.5, 3.0]
    assert parsed.data.shape == (3, 3)
    assert parsed.data[1, 1] == 0.02


def test_parse_param_matrix(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text(MATRIX_PARAMS)
    parsed = parse_csv(p)
    assert parsed.rows_label == "Omega"
    assert list(parsed.row_values) == [0.2, 1.0]


def test_parse_columns(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text(COLUMNS)
    parsed = parse_csv(p)
    assert parsed.layout == "columns"
    assert parsed.columns == ["t", "N", "Sz"]
    assert np.allclose(parsed.column("Sz"), [-0.5, -0.499])
    with pytest.raises(MissingColumns):
        parsed.column("energy")


def test_nan_cells_preserved(tmp_path):
    p = tmp_path / "n.csv"
    p.write_text("g0,number\n0,0\n0.5,nan\n")
    parsed = parse_csv(p)
    assert np.isnan(parsed.data[1, 1])


def test_empty_file_rejected(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(MalformedCSV):
        parse_csv(p)


def test_header_only_rejected(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("t,N\n")
    with pytest.raises(MalformedCSV):
        parse_csv(p)


def test_ragged_rows_rejected(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("t,N\n0,1\n0.1,2,3\n")
    with pytest.raises(MalformedCSV):
        parse_csv(p)


def test_non_numeric_rejected(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("t,N\n0,banana\n")
    with pytest.raises(MalformedCSV):
        parse_csv(p)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(MalformedCSV):
        parse_csv(tmp_path / "ghost.csv")
