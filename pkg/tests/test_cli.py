import json
import subprocess
import sys

import jsonschema
import pytest

from gqkit import cli

CASES = {
    "cf": {"cf": [1, 1, 1, 1, 1]},
    "bs-scan": {"preset": "linear", "c": 1, "domain": [-1.5, 1.5]},
    "solve-mv": {"eta": {"preset": "golden"}, "w_hat": {"cutoff": 32, "entries": [[0, 1, 0], [3, 0.5, 0]]},
                 "w": {"cutoff": 32, "entries": [[0, 1, 0], [-2, 0, 0.25]]}},
    "quantize-fibration": {"intervals": [{"lo": -1.5, "hi": 1.5}]},
    "quantize-torus": {"variant": "generic", "mode": {"prequantum": 1},
                       "leaves": [{"lambda": 1, "bs": True}, {"lambda": -1, "bs": False}, {"lambda": 2, "bs": True}]},
    "liouville-demo": {"order": 6},
    "tangency": {"f": [0.1 * __import__("math").sin(2 * 3.141592653589793 * i / 64) for i in range(64)],
                 "field": [1, 0]},
}


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize("command", sorted(CASES))
def test_output_validates_and_reruns_identically(capsys, command):
    arg = json.dumps(CASES[command])
    code, first = run_cli(capsys, command, arg)
    assert code == 0, first
    doc = json.loads(first)
    jsonschema.validate(doc, cli.OUTPUT_SCHEMAS[command])
    _, second = run_cli(capsys, command, arg)
    assert first == second


def test_fibration_exact_output(capsys):
    code, out = run_cli(capsys, "quantize-fibration", json.dumps(CASES["quantize-fibration"]))
    assert code == 0
    assert json.loads(out) == {"degrees": {"0": {"finite": 0}, "1": {"finite": 3}}}


def test_bs_scan_points(capsys):
    _, out = run_cli(capsys, "bs-scan", json.dumps(CASES["bs-scan"]))
    xs = [p["x"] for p in json.loads(out)["bs_points"]]
    assert [round(x, 9) for x in xs] == [-1.0, 0.0, 1.0]


def test_no_solution_is_success(capsys):
    data = {"eta": {"preset": "golden"}, "w_hat": {"cutoff": 32, "entries": [[0, 1, 0]]},
            "w": {"cutoff": 32, "entries": [[0, 2, 0]]}}
    code, out = run_cli(capsys, "solve-mv", json.dumps(data))
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "no-solution" and doc["obstruction"] == "w0_mismatch"


def test_schema_error_exit_2(capsys):
    code, out = run_cli(capsys, "quantize-fibration", json.dumps({"intervals": []}))
    assert code == 2
    jsonschema.validate(json.loads(out), cli.OUTPUT_SCHEMAS["error"])


def test_bad_json_exit_2(capsys):
    code, _ = run_cli(capsys, "cf", "{not json")
    assert code == 2


def test_small_cutoff_exit_2(capsys):
    code, _ = run_cli(capsys, "solve-mv", json.dumps(CASES["solve-mv"]), "--cutoff", "8")
    assert code == 2


def test_solver_failure_exit_3(capsys):
    code, out = run_cli(capsys, "cf", json.dumps({"value_decimal": "1.4142", "depth": 30}))
    assert code == 3
    assert json.loads(out)["error"] == "PrecisionExhausted"


def test_degenerate_tangency_exit_3(capsys):
    code, _ = run_cli(capsys, "tangency", json.dumps({"f": [0.0] * 16, "field": [1, 0]}))
    assert code == 3


def test_csv_output_and_file(tmp_path, capsys):
    out = tmp_path / "pts.csv"
    code, _ = run_cli(capsys, "quantize-fibration", json.dumps(CASES["quantize-fibration"]),
                      "--format", "csv", "--out", str(out))
    assert code == 0
    assert out.read_bytes() == b"f1\n-1\n0\n1\n"


def test_input_file_and_stdin(tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(CASES["cf"]))
    a = subprocess.run([sys.executable, "-m", "gqkit.cli", "cf", str(path)], capture_output=True, text=True)
    b = subprocess.run([sys.executable, "-m", "gqkit.cli", "cf", "-"], input=json.dumps(CASES["cf"]),
                       capture_output=True, text=True)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_prequantum_seeds(capsys):
    data = {"eta": {"preset": "golden"}, "mode": {"prequantum": 2},
            "w_hat": {"cutoff": 64, "entries": []}, "w": {"cutoff": 64, "entries": [[0, 1, 0]]}}
    code, out = run_cli(capsys, "solve-mv", json.dumps(data), "--seed-v", "[1, 0]")
    assert code == 0
    doc = json.loads(out)
    mods = {k: (re * re + im * im) ** 0.5 for k, re, im in doc["v"]["entries"]}
    assert all(abs(mods[k] - 1) < 1e-12 for k in range(0, 65, 2))
    code, _ = run_cli(capsys, "solve-mv", json.dumps(data), "--seed-v", "[1]")
    assert code == 2
