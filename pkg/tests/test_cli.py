import json
import math

import numpy as np
import pytest

from besovseq.cli import main
from besovseq.estimator import CriticalCurve
from besovseq.haar import step_signal
from besovseq.sequence import WaveletSequence


def run(*argv):
    return main(["--no-timestamp", *map(str, argv)])


def test_synth_lacunary_estimate_and_check(tmp_path):
    seq_path = tmp_path / "lac.json"
    assert run("synth", "lacunary", "--alpha0", 0.5, "--s0", 0.25, "--scales", 14, "-o", seq_path) == 0
    seq = WaveletSequence.load(seq_path)
    assert seq.meta["provenance"]["command"] == "synth"

    curve_path = tmp_path / "lac.csv"
    report_path = tmp_path / "props.json"
    assert run("estimate", seq_path, "-o", curve_path, "--report", report_path) == 0
    curve = CriticalCurve.load(curve_path)
    assert np.allclose(curve.s_values, 0.25 + 0.5 * curve.u_grid, atol=1e-12)
    assert json.loads(report_path.read_text())["monotone"] is True
    assert run("check", seq_path, "-o", tmp_path / "check.json") == 0


def test_output_is_deterministic(tmp_path):
    path = tmp_path / "g.json"
    outputs = []
    for _ in range(2):
        assert run("--seed", 5, "synth", "gaussian", "--H", 0.5, "--scales", 8, "-o", path) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert json.loads(outputs[0])["meta"]["provenance"]["seed"] == 5


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("BESOVSEQ_SEED", "11")
    path = tmp_path / "g.json"
    assert run("synth", "gaussian", "--H", 0.5, "--scales", 6, "-o", path) == 0
    assert WaveletSequence.load(path).meta["seed"] == 11
    monkeypatch.setenv("BESOVSEQ_SEED", "eleven")
    assert run("synth", "gaussian", "--H", 0.5, "--scales", 6, "-o", path) == 2


def test_compress_reproduces_lacunary_prediction(tmp_path):
    seq_path = tmp_path / "lac.json"
    run("synth", "lacunary", "--alpha0", 0.5, "--s0", 0.0, "--scales", 18, "-o", seq_path)
    out, csv = tmp_path / "rep.json", tmp_path / "sigma.csv"
    assert run("compress", seq_path, "--p0", 2, "--s0", 0, "-o", out, "--csv", csv) == 0
    doc = json.loads(out.read_text())
    assert doc["kappa_pred"] == pytest.approx(0.5, abs=1e-12)
    assert abs(doc["kappa_hat"] - 0.5) <= 0.1
    assert csv.read_text().startswith("N,sigma\n1,")


def test_compress_hypothesis_violation_exit_code(tmp_path):
    seq_path = tmp_path / "d.json"
    run("synth", "dirac", "--scales", 10, "-o", seq_path)
    assert run("compress", seq_path, "--p0", 1, "--s0", 0, "-o", tmp_path / "r.json") == 3


def test_bad_parameters_exit_code(tmp_path):
    assert run("synth", "lacunary", "--alpha0", 2, "--s0", 0, "--scales", 8, "-o", tmp_path / "x.json") == 2
    assert run("check-embed", "--src", "1,1", "--dst", "1,1,0") == 2


def test_check_fails_on_steep_curve(tmp_path):
    # two-scale coefficients growing much faster than 2^j break the Lipschitz bound
    blocks = [np.zeros(1)] + [np.zeros(2**j) for j in range(1, 9)]
    for j in range(1, 9):
        blocks[j][: 2 ** (j - 1)] = 1.0
        blocks[j][0] = 8.0**j
    path = tmp_path / "steep.json"
    WaveletSequence(tuple(blocks)).save(path)
    assert run("check", path, "--tol", 0.01, "-o", tmp_path / "props.json") == 1
    assert json.loads((tmp_path / "props.json").read_text())["witnesses"]


def test_analyze_haar_signal(tmp_path):
    sig = tmp_path / "step.csv"
    sig.write_text("x\n" + "\n".join(repr(v) for v in step_signal(12).tolist()) + "\n")
    seq_path = tmp_path / "step.json"
    assert run("analyze", sig, "-o", seq_path) == 0
    report = tmp_path / "r.json"
    assert run("estimate", seq_path, "-o", tmp_path / "c.csv", "--report", report) == 0
    assert "above_haar_range" in json.loads(report.read_text())


def test_from_curve_writes_tangents(tmp_path):
    curve_csv = tmp_path / "log.csv"
    u = np.linspace(0, 4, 41)
    curve_csv.write_text("u,s\n" + "\n".join(f"{a!r},{math.log1p(a)!r}" for a in u.tolist()) + "\n")
    out = tmp_path / "fc.json"
    assert run("synth", "from-curve", "--curve", curve_csv, "--terms", 6, "--scales", 10, "-o", out) == 0
    tangents = json.loads((tmp_path / "fc.tangents.json").read_text())
    assert len(tangents["terms"]) == 6


def test_combine_and_diagram(tmp_path, capsys):
    a, b, ab = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "ab.json"
    run("synth", "lacunary", "--alpha0", 1, "--s0", 0, "--scales", 12, "-o", a)
    run("synth", "lacunary", "--alpha0", 0, "--s0", 1, "--scales", 12, "-o", b)
    assert run("synth", "combine", a, b, "--weights", "1,1", "-o", ab) == 0
    ca = tmp_path / "ca.csv"
    run("estimate", a, "-o", ca)
    diag = tmp_path / "diag.csv"
    assert run("diagram", ca, "--p0", 2, "--s0", 0, "-o", diag) == 0
    rows = diag.read_text().splitlines()
    assert rows[0] == "series,u,s"
    assert any(r.startswith("line,0.5,0.0") for r in rows)
    assert run("diagram", ca, "--p0", 2) == 2


def test_check_embed(capsys):
    assert run("check-embed", "--src", "1,1,2", "--dst", "2,2,1") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["embeds"] is True
    assert run("check-embed", "--src", "1,1,1", "--dst", "inf,inf,0") == 0
    assert json.loads(capsys.readouterr().out)["embeds"] is False
