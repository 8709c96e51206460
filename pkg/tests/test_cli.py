from __future__ import annotations

import io
import json
import math
import subprocess
import sys

import jsonschema
import pytest

from fdw_backward import io as fio
from fdw_backward.cli import COMMANDS, EXIT_ERROR, EXIT_ILL_POSED, EXIT_OK, EXIT_USAGE, RunConfig, UsageError, main
from fdw_backward.psi_zero import default_zeros
from fdw_backward.spectral_model import dirichlet_laplacian_1d


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write_problem(tmp_path, **fields):
    data = {"alpha": 1.5, "spectrum": {"kind": "dirichlet_laplacian_1d", "length": math.pi, "n_modes": 4}}
    data.update(fields)
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(data))
    return str(path)


def exceptional_T(mode=2, alpha=1.5):
    return float((default_zeros(alpha).etas[0] / mode**2) ** (1 / alpha))


# -- one invocation per subcommand, each checked against its schema --------------

INVOCATIONS = {
    "ml": ["ml", "--alpha", "1.5", "--beta", "1.5", "--eta", "5"],
    "psi-zeros": ["psi-zeros", "--alpha", "1.5"],
    "psi-table": ["psi-table", "--alpha", "1.5", "--eta-max", "20", "--points", "11", "--json"],
    "bound": ["bound", "--alpha", "1.5", "--mu-min", "1"],
    "lambda-set": ["lambda-set", "--alpha", "1.5", "--modes", "3"],
    "nullmode": ["nullmode", "--alpha", "1.5", "--modes", "4", "--mode", "3"],
    "roundtrip": ["roundtrip", "--alpha", "1.5", "--modes", "8", "--samples", "3"],
    "ode": ["ode", "--direction", "forward", "--lam", "2", "--alpha", "1.5", "--t", "1", "--a", "1", "--b", "0"],
}


@pytest.mark.parametrize("command", sorted(INVOCATIONS))
def test_subcommand_json_matches_schema(command):
    code, out, _ = call(*INVOCATIONS[command])
    assert code == EXIT_OK
    jsonschema.validate(json.loads(out), fio.OUTPUT_SCHEMAS[command])


def test_forward_and_backward_schema(tmp_path):
    prob = write_problem(tmp_path, T=3.0, a=[1, 0, 0.5, 0], b=[0, 1, 0, 0])
    code, out, _ = call("forward", "--problem", prob)
    assert code == EXIT_OK
    fwd = json.loads(out)
    jsonschema.validate(fwd, fio.OUTPUT_SCHEMAS["forward"])
    prob2 = write_problem(tmp_path, T=3.0, aT=fwd["u"], bT=fwd["du"])
    code, out, _ = call("backward", "--problem", prob2)
    assert code == EXIT_OK
    back = json.loads(out)
    jsonschema.validate(back, fio.OUTPUT_SCHEMAS["backward"])
    assert back["a"] == pytest.approx([1, 0, 0.5, 0], abs=1e-10)
    assert back["b"] == pytest.approx([0, 1, 0, 0], abs=1e-10)


def test_every_command_is_covered():
    assert set(INVOCATIONS) | {"forward", "backward"} == set(COMMANDS)


# -- values and formatting ------------------------------------------------------


def test_ml_cosine_to_the_last_digit():
    code, out, _ = call("ml", "--alpha", "2", "--beta", "1", "--eta", "4")
    assert code == EXIT_OK
    value = json.loads(out)["value"]
    assert value == math.cos(2.0)
    assert '"value": -0.41614683654714241' in out


def test_floats_carry_17_significant_digits():
    assert fio.format_float(0.1) == "0.10000000000000001"
    assert float(fio.format_float(math.pi)) == math.pi
    with pytest.raises(ValueError):
        fio.format_float(math.nan)


def test_psi_zeros_matches_census(zero_census):
    code, out, _ = call("psi-zeros", "--alpha", "1.5")
    assert code == EXIT_OK
    data = json.loads(out)
    ref = zero_census[1.5]
    assert data["count"] == ref["count"]
    for z, r in zip(data["zeros"], ref["zeros"]):
        assert r["lo"] <= z["eta"] <= r["hi"]


def test_psi_table_csv_default():
    code, out, _ = call("psi-table", "--alpha", "1.5", "--eta-max", "10", "--points", "5")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "eta,psi" and len(lines) == 6
    assert lines[1] == "0,1"


def test_forward_csv_profile(tmp_path):
    prob = write_problem(tmp_path, t=0.5, a=[1, 0, 0, 0], b=[0, 0, 0, 0])
    code, out, _ = call("forward", "--problem", prob, "--csv", "--grid-points", "9")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "x,u,du" and len(lines) == 10


# -- exit codes -----------------------------------------------------------------


def test_backward_at_exceptional_time_exits_2(tmp_path):
    prob = write_problem(tmp_path, T=exceptional_T(2), aT=[0, 0, 0, 0], bT=[0, 0, 0, 0])
    code, out, err = call("backward", "--problem", prob)
    assert code == EXIT_ILL_POSED
    data = json.loads(out)
    assert data["status"] == "ill_posed" and data["modes"] == [2]
    jsonschema.validate(data, fio.OUTPUT_SCHEMAS["backward"])
    assert "ill-posed" in err


def test_backward_force_exits_0(tmp_path):
    prob = write_problem(tmp_path, T=exceptional_T(2), aT=[1, 1, 1, 1], bT=[0, 0, 0, 0])
    with pytest.warns(RuntimeWarning):
        code, out, _ = call("backward", "--problem", prob, "--force")
    assert code == EXIT_OK
    assert json.loads(out)["diagnostics"]["refused_modes"] == [2]


def test_ode_backward_at_exceptional_time_exits_2():
    T = exceptional_T(1)
    code, out, _ = call(
        "ode", "--direction", "backward", "--lam", "1", "--alpha", "1.5", "--t", repr(T), "--a", "0", "--b", "0"
    )
    assert code == EXIT_ILL_POSED
    assert json.loads(out)["modes"] == [1]


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        [],
        ["ml", "--alpha", "1.5"],
        ["ml", "--alpha", "x", "--beta", "1", "--eta", "1"],
        ["psi-table", "--alpha", "1.5", "--eta-max", "1", "--eta-min", "2"],
        ["nullmode", "--alpha", "1.5", "--modes", "3", "--mode", "7"],
    ],
)
def test_usage_errors_exit_64_with_schema(argv):
    code, out, err = call(*argv)
    assert code == EXIT_USAGE
    assert out == ""
    assert "Problem file schema" in err and '"spectrum"' in err


def test_schema_violation_exits_64(tmp_path):
    prob = write_problem(tmp_path, T=1.0, aT=[0, 0, 0, 0], bT=[0, 0, 0, 0], extra=1)
    assert call("backward", "--problem", prob)[0] == EXIT_USAGE
    prob = write_problem(tmp_path, T=1.0, aT=[0, 0, 0], bT=[0, 0, 0, 0])
    assert call("backward", "--problem", prob)[0] == EXIT_USAGE
    prob = write_problem(tmp_path, T=1.0)
    assert call("backward", "--problem", prob)[0] == EXIT_USAGE


def test_input_and_numerical_errors_exit_1(tmp_path):
    assert call("forward", "--problem", str(tmp_path / "missing.json"))[0] == EXIT_ERROR
    assert call("ml", "--alpha", "2.5", "--beta", "1", "--eta", "1")[0] == EXIT_ERROR
    assert call("bound", "--alpha", "1.5", "--theta", "1.0")[0] == EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("forward", "--problem", str(bad))[0] == EXIT_ERROR


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("nope").validate()
    with pytest.raises(UsageError):
        RunConfig("ml", output="xml").validate()
    with pytest.raises(UsageError):
        RunConfig("ml", threads=0).validate()


# -- determinism ------------------------------------------------------------------


def test_identical_inputs_give_identical_bytes():
    argv = ["roundtrip", "--alpha", "1.5", "--modes", "8", "--samples", "4", "--seed", "9"]
    first, second = call(*argv), call(*argv)
    assert first == second
    assert call(*argv[:-1], "10")[1] != first[1]


def test_threads_do_not_change_output(tmp_path):
    prob = write_problem(tmp_path, t=2.0, a=[1, 2, 3, 4], b=[4, 3, 2, 1])
    outs = {call("forward", "--problem", prob, "--threads", str(n))[1] for n in (1, 2, 3)}
    assert len(outs) == 1
    argv = ["roundtrip", "--alpha", "1.8", "--modes", "12", "--samples", "2"]
    assert call(*argv, "--threads", "1") == call(*argv, "--threads", "4")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fdw_backward", "ml", "--alpha", "1.5", "--beta", "1", "--eta", "0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == 1.0


# -- problem files ----------------------------------------------------------------


def test_problem_file_user_spectrum(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(
        json.dumps(
            {
                "alpha": 1.3,
                "T": 2.0,
                "spectrum": {"eigenvalues": [1.0, 2.5], "multiplicities": [2, 1]},
                "aT": [1, 2, 3],
                "bT": [0, 0, 0],
                "tolerances": {"psi_floor": 1e-6},
            }
        )
    )
    pspec = fio.load_problem(path)
    assert pspec.spectrum.size == 3 and pspec.psi_floor == 1e-6
    assert pspec.a is None and list(pspec.aT.values) == [1, 2, 3]
    with pytest.raises(fio.ProblemSpecError):
        pspec.require("a")


def test_problem_file_laplacian():
    pspec = fio.problem_from_dict(
        {"alpha": 1.5, "spectrum": {"kind": "dirichlet_laplacian_1d", "length": 2.0, "n_modes": 5}}
    )
    assert pspec.spectrum == dirichlet_laplacian_1d(2.0, 5)


@pytest.mark.parametrize(
    "spectrum",
    [{"eigenvalues": []}, {"eigenvalues": [-1.0]}, {"kind": "dirichlet_laplacian_1d", "length": 1.0}, {"foo": 1}],
)
def test_bad_spectra_rejected(spectrum):
    with pytest.raises(fio.ProblemSpecError):
        fio.problem_from_dict({"alpha": 1.5, "spectrum": spectrum})


def test_schema_text_is_json():
    schema = json.loads(fio.problem_schema_text())
    assert schema["properties"]["spectrum"] and "alpha" in schema["required"]


def test_dumps_roundtrip():
    obj = {"x": [0.1, 1e-300, -2.5e17], "n": 3, "ok": True, "none": None, "s": "a\"b"}
    assert json.loads(fio.dumps(obj)) == obj
    with pytest.raises(TypeError):
        fio.dumps({"bad": object()})
