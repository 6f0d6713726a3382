import json

import numpy as np
import pytest

from nordengeom.cli import main
from nordengeom.generator import canonical_norden


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def w3_file(tmp_path):
    path = tmp_path / "w3.json"
    assert main(["generate", "--kind", "w3", "--dim", "4", "--seed", "7", "--output", str(path)]) == 0
    return path


def test_generate_to_stdout(capsys):
    code, out, _ = run(capsys, "generate", "--kind", "kahler", "--dim", "4")
    doc = json.loads(out)
    assert code == 0 and doc["dim"] == 4 and doc["generator"]["prng"] == "PCG64"


def test_generate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["generate", "--kind", "w3", "--dim", "6", "--seed", "3", "--output", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("cmd", ["validate", "classify", "invariants", "verify"])
def test_commands_succeed_on_w3(capsys, w3_file, cmd):
    code, out, _ = run(capsys, cmd, "--input", str(w3_file))
    doc = json.loads(out)
    assert code == 0
    assert doc["command"] == cmd and doc["model"]["dim"] == 4
    assert "tolerances" in doc


def test_classify_report(capsys, w3_file):
    _, out, _ = run(capsys, "classify", "--input", str(w3_file))
    classes = json.loads(out)["classes"]
    assert classes["is_W3"] and not classes["is_W0"]
    assert classes["residual_W3"] <= 1e-8


def test_invariants_report(capsys, w3_file):
    _, out, _ = run(capsys, "invariants", "--input", str(w3_file))
    inv = json.loads(out)["invariants"]
    assert inv["snorm"] == pytest.approx(-2 * (inv["tau"] + inv["tau_star2"]), abs=1e-10)
    assert inv["checks"][0]["status"] == "pass"


def test_verify_report_is_deterministic(capsys, w3_file):
    _, a, _ = run(capsys, "verify", "--input", str(w3_file), "--seed", "5", "--samples", "50")
    _, b, _ = run(capsys, "verify", "--input", str(w3_file), "--seed", "5", "--samples", "50")
    assert a == b
    doc = json.loads(a)
    assert doc["summary"]["ok"] and doc["config"]["samples"] == 50


def test_debug_perturbation_fails(capsys, w3_file):
    code, out, _ = run(capsys, "verify", "--input", str(w3_file), "--debug-perturb-gamma", "1e-3")
    doc = json.loads(out)
    assert code == 1
    row = next(r for r in doc["checks"] if r["name"] == "theorem1_i")
    assert row["status"] == "fail" and row["value"] >= 1e-6


def test_identity_J_is_invalid(capsys, tmp_path):
    s = canonical_norden(4)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 4, "structure_constants": [], "metric": s.g.tolist(),
                                "J": np.eye(4).tolist()}))
    code, out, err = run(capsys, "validate", "--input", str(path))
    assert code == 1
    assert json.loads(out)["error"]["type"] == "NotAlmostComplex"
    assert "NotAlmostComplex" in err


def test_truncated_file_is_parse_error(capsys, tmp_path, w3_file):
    path = tmp_path / "cut.json"
    path.write_text(w3_file.read_text()[:40])
    code, out, _ = run(capsys, "validate", "--input", str(path))
    assert code == 2 and out == ""


def test_missing_file_is_parse_error(capsys, tmp_path):
    code, _, _ = run(capsys, "classify", "--input", str(tmp_path / "nope.json"))
    assert code == 2


def test_bad_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--dim", "5"])
    assert exc.value.code == 2


def test_generator_failure_exit_3(capsys):
    code, out, err = run(capsys, "generate", "--kind", "isotropic-w3", "--dim", "4",
                         "--max-retries", "0")
    assert code == 3 and "NotFound" in err and out == ""


@pytest.mark.parametrize("kind", ["kahler", "w3"])
@pytest.mark.parametrize("dim", [4, 6])
def test_round_trip_twenty_seeds(tmp_path, kind, dim):
    for seed in range(20):
        path = tmp_path / f"{kind}-{dim}-{seed}.json"
        assert main(["generate", "--kind", kind, "--dim", str(dim), "--seed", str(seed),
                     "--output", str(path)]) == 0
        for cmd in ("validate", "classify", "verify"):
            out = tmp_path / f"{cmd}.json"
            assert main([cmd, "--input", str(path), "--output", str(out), "--samples", "100"]
                        if cmd == "verify" else [cmd, "--input", str(path), "--output", str(out)]) == 0
