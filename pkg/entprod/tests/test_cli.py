import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from ..cli import StateFile, load_decoherence_spec, load_state_file, main, parse_number, parse_partition, parse_range
from ..cli.formatting import format_csv, format_value
from ..cli.parsing import parse_fraction
from ..config import Config
from ..errors import ValidationError
from ..hilbert import DenseOperator, Partition, SpaceLayout
from .randomness import random_density

LN2 = math.log(2)
DATA_DIR = Path(__file__).parent / "data"


def last_json(text: str) -> dict:
    return json.loads(text[text.rindex("{\n"):])


def read_csv(text: str) -> tuple[list[str], list[list[str]], list[str]]:
    lines = text.splitlines()
    trailer = [line for line in lines if line.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(line for line in lines if not line.startswith("#")))))
    return rows[0], rows[1:], trailer


def write_state(path, matrix, dims, partition=None) -> str:
    op = DenseOperator(SpaceLayout(dims), np.asarray(matrix, dtype=complex))
    path.write_text(StateFile.from_operator(op, partition).to_json())
    return str(path)


@pytest.fixture
def decoherence_spec(tmp_path):
    psi = np.array([1.0, 1.0, 1.0, 0.0]) / math.sqrt(3)
    rho0 = np.outer(psi, psi)
    data = {
        "dims": [2, 2],
        "energies": [[0.0, 1.3], [0.7, 2.9]],
        "rho0": {"re": rho0.tolist(), "im": np.zeros((4, 4)).tolist()},
        "gamma": 1.0,
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(data))
    return str(path)


# --- Test parsing ---

def test_parse_partition():
    assert parse_partition("0,1|2").blocks == ((0, 1), (2,))
    assert parse_partition("2|0,1").blocks == ((2,), (0, 1))
    for bad in ("0 | 1", "0||1", "a|b", "0,1|1"):
        with pytest.raises(ValidationError):
            parse_partition(bad)


def test_parse_range():
    r = parse_range("0.5:2:4")
    assert (r.start, r.stop, r.steps) == (0.5, 2.0, 4)
    for bad in ("0:1", "0:1:x", "0:1:0"):
        with pytest.raises(ValidationError):
            parse_range(bad)


def test_parse_number():
    assert parse_number("0.5") == 0.5
    assert parse_number("1+2j") == 1 + 2j
    assert parse_number("1/sqrt(2)").real == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(ValidationError):
        parse_number("import os")


def test_parse_fraction():
    assert parse_fraction("1/2") == Fraction(1, 2)
    assert parse_fraction("1.5") == Fraction(3, 2)
    with pytest.raises(ValidationError):
        parse_fraction("half")


# --- Test formatting ---

def test_format_value():
    assert format_value(None) == ""
    assert format_value(3) == "3"
    assert format_value(Fraction(1, 2)) == "0.5"
    assert format_value(1 / 3) == "0.333333333333"


def test_format_csv_trailer():
    text = format_csv(["a", "b"], [[1, 0.5], [2, None]], trailer="x=1")
    assert text == "a,b\n1,0.5\n2,\n# x=1\n"


# --- Test state files ---

def test_state_file_round_trip(tmp_path):
    rho = random_density(np.random.default_rng(0), (2, 3))
    path = write_state(tmp_path / "rho.json", rho.matrix, (2, 3), Partition(((0,), (1,))))
    op, partition = load_state_file(path)
    assert op.layout.dims == (2, 3)
    assert np.array_equal(op.matrix, rho.matrix)
    assert partition.blocks == ((0,), (1,))


def test_state_file_missing_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dims": [2], "re": [[1, 0], [0, 0]]}))
    with pytest.raises(ValidationError):
        load_state_file(str(path))


def test_state_file_dimension_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dims": [2, 2], "re": np.eye(2).tolist(), "im": np.zeros((2, 2)).tolist()}))
    with pytest.raises(ValidationError):
        load_state_file(str(path))


def test_load_decoherence_spec(decoherence_spec):
    spec, damping = load_decoherence_spec(decoherence_spec)
    assert (spec.dim_A, spec.dim_B) == (2, 2)
    assert np.array_equal(damping.system.gamma, [[0.0, 1.0], [1.0, 0.0]])


# --- Test measure command ---

def test_measure_bell(tmp_path, capsys):
    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    path = write_state(tmp_path / "bell.json", bell, (2, 2))
    assert main(["measure", path, "--partition", "0|1"]) == 0
    report = last_json(capsys.readouterr().out)
    assert report["epsilon"] == pytest.approx(LN2, abs=1e-9)
    assert report["log_base"] == "e"
    assert report["validation"] == {"hermitian": True, "trace": True, "psd": True}
    assert report["norms"]["numerator"] == pytest.approx(1.0)


def test_measure_uses_file_partition_and_base2(tmp_path, capsys):
    product = np.diag([0.6, 0.4, 0.0, 0.0]).astype(float)
    path = write_state(tmp_path / "product.json", product, (2, 2), Partition(((0,), (1,))))
    assert main(["--log-base", "2", "measure", path]) == 0
    report = last_json(capsys.readouterr().out)
    assert abs(report["epsilon"]) <= 1e-10
    assert report["log_base"] == "2"


def test_measure_zero_trace(tmp_path, capsys):
    path = write_state(tmp_path / "z.json", np.diag([1.0, -1.0]), (2,))
    assert main(["measure", path, "--partition", "0"]) == 3
    error = last_json(capsys.readouterr().err)
    assert error["error_code"] == 3
    assert "zero trace" in error["error_message"]


def test_measure_rejects_non_density_unless_operator(tmp_path, capsys):
    path = write_state(tmp_path / "h.json", np.diag([2.0, 0.5, 0.5, -1.0]), (2, 2))
    assert main(["measure", path, "--partition", "0|1"]) == 2
    assert last_json(capsys.readouterr().err)["error_code"] == 2
    assert main(["measure", path, "--partition", "0|1", "--operator"]) == 0
    report = last_json(capsys.readouterr().out)
    assert report["validation"]["trace"] is False
    assert math.isfinite(report["epsilon"])


def test_measure_rejects_whitespace_partition(tmp_path, capsys):
    path = write_state(tmp_path / "p.json", np.eye(4) / 4, (2, 2))
    assert main(["measure", path, "--partition", "0 | 1"]) == 2


def test_measure_needs_partition(tmp_path, capsys):
    path = write_state(tmp_path / "p.json", np.eye(4) / 4, (2, 2))
    assert main(["measure", path]) == 2


@pytest.mark.parametrize("data", [
    {"dims": 4, "re": [[1.0]], "im": [[0.0]]},
    {"dims": [2], "re": [[1.0, "x"], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
    {"dims": [2], "re": [[1.0, 0.0], [0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
])
def test_measure_malformed_state_file(data, tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    assert main(["measure", str(path), "--partition", "0"]) == 2
    assert last_json(capsys.readouterr().err)["error_code"] == 2


# --- Test states command ---

def test_states_ghz_summary(capsys):
    assert main(["states", "--kind", "ghz", "--n", "4"]) == 0
    captured = capsys.readouterr()
    state = json.loads(captured.out)
    assert state["dims"] == [2, 2, 2, 2]
    assert state["partition"] == [[0], [1], [2], [3]]
    summary = last_json(captured.err)
    assert summary["epsilon"] == pytest.approx(2 * LN2)
    assert summary["kind"] == "ghz"


def test_states_writes_file_then_measures(tmp_path, capsys):
    out = tmp_path / "sep.json"
    assert main(["--out", str(out), "states", "--kind", "separable", "--n", "2", "--weights", "0.5,0.5"]) == 0
    summary = last_json(capsys.readouterr().out)
    assert summary["epsilon"] == pytest.approx(0.5 * LN2)
    assert main(["measure", str(out)]) == 0
    assert last_json(capsys.readouterr().out)["epsilon"] == pytest.approx(0.5 * LN2, abs=1e-9)


def test_states_multicat_product(capsys):
    assert main(["states", "--kind", "multicat", "--n", "3", "--coeffs", "1,0"]) == 0
    assert last_json(capsys.readouterr().err)["epsilon"] == pytest.approx(0.0, abs=1e-12)


def test_states_expression_coefficients(capsys):
    assert main(["states", "--kind", "multicat", "--n", "2", "--coeffs", "1/sqrt(2),1/sqrt(2)"]) == 0
    assert last_json(capsys.readouterr().err)["epsilon"] == pytest.approx(LN2)


def test_states_base2(capsys):
    assert main(["--log-base", "2", "states", "--kind", "multimode", "--n", "2", "--m", "4"]) == 0
    summary = last_json(capsys.readouterr().err)
    assert summary["epsilon"] == pytest.approx(2.0)
    assert summary["log_base"] == "2"


@pytest.mark.parametrize("argv", [
    ["states", "--kind", "multicat", "--n", "2", "--coeffs", "1,1"],
    ["states", "--kind", "separable", "--weights", "0.7,0.7"],
    ["states", "--kind", "multicat", "--n", "2"],
    ["states", "--kind", "epr", "--n", "3"],
])
def test_states_validation_exit_code(argv, capsys):
    assert main(argv) == 2
    assert last_json(capsys.readouterr().err)["error_code"] == 2


# --- Test gibbs2q command ---

def test_gibbs2q_single_cell(capsys):
    assert main(["gibbs2q", "--coupling", "ferro", "--t-range", "1:1:0", "--h-range", "0:0:0"]) == 0
    header, rows, _ = read_csv(capsys.readouterr().out)
    assert header == ["T", "h", "epsilon"]
    assert rows[0][:2] == ["1", "0"]
    assert float(rows[0][2]) == pytest.approx(0.5 * math.log(2 * math.cosh(1) / (1 + math.cosh(1))), abs=1e-11)


def test_gibbs2q_antiferro_low_temperature_row(capsys):
    assert main(["gibbs2q", "--coupling", "antiferro", "--t-range", "0.02:0.02:0", "--h-range", "0:2:4"]) == 0
    _, rows, _ = read_csv(capsys.readouterr().out)
    values = {float(r[1]): float(r[2]) for r in rows}
    assert values[0.5] == pytest.approx(0.5 * LN2, abs=1e-6)
    assert values[1.0] == pytest.approx(0.5 * math.log(27 / 25), abs=2e-3)
    assert values[2.0] == pytest.approx(0.0, abs=1e-6)


def test_gibbs2q_asymptotic_columns(capsys):
    argv = ["gibbs2q", "--coupling", "ferro", "--t-range", "0.5:1:1", "--h-range", "0:1:1", "--asymptotics"]
    assert main(argv) == 0
    header, rows, _ = read_csv(capsys.readouterr().out)
    assert header == ["T", "h", "epsilon", "ferro_low_t", "ferro_small_field", "ferro_high_t", "ferro_large_field"]
    assert rows[0][3] == ""
    assert len(rows) == 4


def test_gibbs2q_range_counts_intervals(capsys):
    assert main(["gibbs2q", "--coupling", "ferro", "--t-range", "1:1:0", "--h-range", "0:3:30"]) == 0
    _, rows, _ = read_csv(capsys.readouterr().out)
    assert len(rows) == 31
    assert [r[1] for r in rows[:3]] == ["0", "0.1", "0.2"]
    assert rows[-1][1] == "3"


@pytest.mark.parametrize("coupling,t_range,h_range", [
    ("ferro", "0.25:2:7", "0:1:4"),
    ("antiferro", "0.25:2:7", "0:2:8"),
])
def test_gibbs2q_matches_golden_grid(coupling, t_range, h_range, monkeypatch, capsys):
    monkeypatch.setattr(Config, "CSV_SIGNIFICANT_DIGITS", 9)
    assert main(["gibbs2q", "--coupling", coupling, "--t-range", t_range, "--h-range", h_range]) == 0
    assert capsys.readouterr().out == (DATA_DIR / f"gibbs2q_{coupling}.csv").read_text()


@pytest.mark.parametrize("t_range", ["0:1:3", "1:2", "1:2:0", "1:1:2", "1:2:-1"])
def test_gibbs2q_invalid_range(t_range, capsys):
    assert main(["gibbs2q", "--coupling", "ferro", "--t-range", t_range, "--h-range", "0:1:2"]) == 2


# --- Test decohere command ---

def test_decohere_exact(decoherence_spec, capsys):
    assert main(["decohere", decoherence_spec, "--t-max", "10", "--steps", "5"]) == 0
    header, rows, trailer = read_csv(capsys.readouterr().out)
    assert header == ["t", "epsilon"]
    assert [float(r[0]) for r in rows] == [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]
    limits = dict(item.split("=") for item in trailer[0].lstrip("# ").split(","))
    assert float(limits["eps_inf"]) >= float(limits["eps0"])
    assert float(rows[0][1]) == pytest.approx(float(limits["eps0"]), abs=1e-10)


def test_decohere_lorentz_reaches_limit(decoherence_spec, capsys):
    assert main(["decohere", decoherence_spec, "--t-max", "100", "--steps", "4", "--mode", "lorentz"]) == 0
    _, rows, trailer = read_csv(capsys.readouterr().out)
    limits = dict(item.split("=") for item in trailer[0].lstrip("# ").split(","))
    assert float(rows[-1][1]) == pytest.approx(float(limits["eps_inf"]), abs=1e-6)


def test_decohere_malformed_spec(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dims": [2, 2], "energies": [[0, 1], [1, 2]]}))
    assert main(["decohere", str(path), "--t-max", "1", "--steps", "2"]) == 2


def test_decohere_lorentz_without_gamma(tmp_path, capsys):
    data = {"dims": [2, 1], "energies": [[0.0], [1.0]], "rho0": {"re": [[0.5, 0.5], [0.5, 0.5]]}}
    path = tmp_path / "nogamma.json"
    path.write_text(json.dumps(data))
    assert main(["decohere", str(path), "--t-max", "1", "--steps", "2", "--mode", "lorentz"]) == 2


@pytest.mark.parametrize("gamma", [{"gamma": "wide"}, {"gamma": [[0, "a"], ["a", 0]], "gamma_env": [[0, 1], [1, 0]]}])
def test_decohere_malformed_gamma(gamma, tmp_path, capsys):
    rho0 = (np.eye(4) / 4).tolist()
    data = {"dims": [2, 2], "energies": [[0.0, 1.3], [0.7, 2.9]], "rho0": {"re": rho0}, **gamma}
    path = tmp_path / "gamma.json"
    path.write_text(json.dumps(data))
    assert main(["decohere", str(path), "--t-max", "1", "--steps", "2", "--mode", "lorentz"]) == 2
    assert last_json(capsys.readouterr().err)["error_code"] == 2


# --- Test spinor command ---

def test_spinor_spin_spatial(capsys):
    assert main(["spinor", "spin-spatial", "--n", "10"]) == 0
    header, rows, _ = read_csv(capsys.readouterr().out)
    assert header == ["N", "S", "epsilon_spin_spatial"]
    assert [round(math.exp(float(r[2]))) for r in rows] == [42, 90, 75, 35, 9, 1]


def test_spinor_particle_maximum(capsys):
    assert main(["spinor", "particle", "--n", "10", "--s", "5", "--sz", "0", "--iz", "0"]) == 0
    header, rows, _ = read_csv(capsys.readouterr().out)
    assert header == ["N", "S", "Sz", "Iz", "epsilon_particle"]
    assert float(rows[0][4]) == pytest.approx(10 * LN2, abs=1e-10)


def test_spinor_particle_with_oracle(capsys):
    assert main(["spinor", "particle", "--n", "4", "--s", "1", "--sz", "1", "--iz", "0", "--oracle"]) == 0
    header, rows, _ = read_csv(capsys.readouterr().out)
    assert header[-1] == "oracle_epsilon"
    closed, oracle = float(rows[0][4]), float(rows[0][5])
    assert closed == pytest.approx(2.32630, abs=1e-5)
    assert abs(closed - oracle) <= 1e-9


def test_spinor_particle_table(capsys):
    assert main(["spinor", "particle", "--n", "2", "--table"]) == 0
    _, rows, _ = read_csv(capsys.readouterr().out)
    assert len(rows) == 10
    assert rows[0][:4] == ["2", "0", "0", "0"]


@pytest.mark.parametrize("argv", [
    ["spinor", "particle", "--n", "4", "--s", "3"],
    ["spinor", "particle", "--n", "4", "--s", "1/2"],
    ["spinor", "particle", "--n", "4"],
    ["spinor", "particle", "--n", "7", "--s", "1/2", "--sz", "1/2", "--iz", "1/2", "--oracle"],
])
def test_spinor_validation_exit_code(argv, capsys):
    assert main(argv) == 2
