import json
import subprocess
import sys

import pytest

from levigauge.cli import DEFAULT_DELTAS, main
from tests.conftest import CORPUS, CORPUS_DIR, corpus_path


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_default_deltas():
    assert len(DEFAULT_DELTAS) == 7
    assert DEFAULT_DELTAS[0] == pytest.approx(1e-2) and DEFAULT_DELTAS[-1] == pytest.approx(1e-5)


def test_analyze_c4(capsys):
    code, out, _ = run(["analyze", "--spec", str(corpus_path("c4"))], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "levi-gauge/1"
    assert doc["index"]["epsilon"] == "1/64"
    assert doc["index"]["gammas"] == ["1/6", "1/24", "1/32"]
    assert doc["index"]["branch"] == ["BASE", "PURE", "MIXED"]


def test_analyze_ball_bounds(capsys):
    code, out, _ = run(["analyze", "--spec", str(corpus_path("ball"))], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["index"]["epsilon"] == "1/2"
    assert (doc["type"]["lower_bound_D"], doc["type"]["upper_bound_D"]) == ("2/1", 2)


def test_analyze_t22_on_c4_is_usage_error(capsys):
    code, _, err = run(["analyze", "--spec", str(corpus_path("c4")), "--mode", "t22"], capsys)
    assert code == 2 and "ModeHypothesisViolated" in err


def test_analyze_t21_epsilon(capsys):
    code, out, _ = run(["analyze", "--spec", str(corpus_path("c4")), "--mode", "t21"], capsys)
    assert json.loads(out)["index"]["epsilon"] == "1/192"


def test_no_floats_for_exact_quantities(capsys):
    _, out, _ = run(["analyze", "--spec", str(corpus_path("c4"))], capsys)
    doc = json.loads(out)
    for key in ("gammas", "alphas"):
        assert all(isinstance(x, str) and "/" in x for x in doc["index"][key])
    assert isinstance(doc["index"]["epsilon"], str)


def test_curve_commands(capsys):
    spec = str(corpus_path("bis_2_3"))
    code, out, _ = run(["curve", "--spec", spec, "--exponents", "canonical"], capsys)
    assert code == 0 and json.loads(out)["contact"] == "6/1"
    code, out, _ = run(["curve", "--spec", spec, "--exponents", "1,0"], capsys)
    assert code == 0 and json.loads(out)["contact"] == "4/1"
    code, _, err = run(["curve", "--spec", spec, "--exponents", "0,0"], capsys)
    assert code == 2 and "all-zero" in err
    code, _, _ = run(["curve", "--spec", spec, "--exponents", "1,a"], capsys)
    assert code == 2


def test_usage_errors(capsys, tmp_path):
    assert run(["analyze", "--spec", str(tmp_path / "missing.json")], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["analyze"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "functions": ["z2", "z1"]}')
    code, _, err = run(["analyze", "--spec", str(bad)], capsys)
    assert code == 2 and "NotTriangular" in err
    spec = str(corpus_path("ball"))
    assert run(["verify", "--spec", spec, "--samples", "0"], capsys)[0] == 2
    assert run(["verify", "--spec", spec, "--deltas", "1e-3", "1e-2", "1e-4"], capsys)[0] == 2
    assert run(["verify", "--spec", spec, "--deltas", "0.5", "1e-2", "1e-3"], capsys)[0] == 2  # beyond unit bound
    assert run(["verify", "--spec", spec, "--mode", "t99"], capsys)[0] == 2


def test_verify_passes_and_writes(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, _, err = run(
        ["verify", "--spec", str(corpus_path("bis_2_3")), "--c", "1/32", "--samples", "500", "--out", str(out)], capsys
    )
    assert code == 0, err
    doc = json.loads(out.read_text())
    assert doc["schema"] == "levi-gauge/1" and doc["verification"]["passed"]
    assert "slope" in err


def test_verify_failure_exit_code_with_witness(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, _, _ = run(["verify", "--spec", str(corpus_path("ball")), "--c", "1/2", "--out", str(out)], capsys)
    assert code == 1
    doc = json.loads(out.read_text())
    assert not doc["verification"]["passed"]
    worst = min(doc["verification"]["per_delta"], key=lambda p: p["min_eig"])
    assert worst["min_eig"] <= 0 and len(worst["argmin"]) == 2


def test_verify_raw_normalization(capsys):
    code, out, _ = run(
        ["verify", "--spec", str(corpus_path("ball")), "--norm", "raw", "--c", "1/32", "--samples", "300",
         "--deltas", "1e-1", "1e-2", "1e-3"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verification"]["psh_global"] is None


def test_report_invalid_spec_writes_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "functions": ["z1 + 1"]}')
    out = tmp_path / "r.json"
    code, _, _ = run(["report", "--spec", str(bad), "--out", str(out)], capsys)
    assert code == 2
    doc = json.loads(out.read_text())
    assert doc["schema"] == "levi-gauge/1" and doc["error"]["type"] == "NonzeroConstantTerm"


def test_report_requires_out(capsys):
    assert run(["report", "--spec", str(corpus_path("ball"))], capsys)[0] == 2


@pytest.mark.parametrize("name", CORPUS)
def test_report_matches_golden(tmp_path, name, capsys):
    out = tmp_path / f"{name}.json"
    main(["report", "--spec", str(corpus_path(name)), "--out", str(out)])
    golden = CORPUS_DIR / "golden" / f"{name}.report.json"
    assert out.read_bytes() == golden.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "levigauge", "analyze", "--spec", str(corpus_path("ball"))],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["index"]["epsilon"] == "1/2"
