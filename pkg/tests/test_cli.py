import io
import json
import subprocess
import sys

import numpy as np
import pytest

from socnormal.cli import main

EX31 = {"m": 3, "x": [1, 0.70710678, 0.70710678], "y": [2, -1.41421356, -1.41421356]}
R2 = np.sqrt(2.0)
EX31_FULL = {
    "m": 3,
    "x": [1.0, 1 / R2, 1 / R2],
    "y": [2.0, -R2, -R2],
    "u": [1 / R2, -1.0, 0.0],
    "v": [1 / (2 * R2), 0.0, 0.5],
}


def run(capsys, monkeypatch, argv, doc):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code = main(argv)
    out = capsys.readouterr()
    return code, json.loads(out.out), out


# ---- classify


def test_classify_bdbd(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["classify"], EX31)
    assert code == 0 and res["status"] == "ok"
    assert res["caseTag"] == "BdBd"
    assert res["k"] == pytest.approx(2.0, abs=1e-7)


def test_classify_zerozero(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["classify"], {"m": 2, "x": [0, 0], "y": [0, 0]})
    assert code == 0 and res["caseTag"] == "ZeroZero" and "k" not in res


def test_classify_not_in_omega(capsys, monkeypatch):
    code, res, out = run(capsys, monkeypatch, ["classify"], {"m": 2, "x": [1, 0], "y": [1, 0]})
    assert code == 3 and res["status"] == "error" and res["code"]
    assert out.err.startswith("socnormal:")


def test_classify_point(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["classify"], {"m": 3, "x": [0, 3, 4]})
    assert code == 0 and res["region"] == "Outside"


@pytest.mark.parametrize(
    "doc",
    [
        {"m": 3, "x": [1, 0]},
        {"m": 2, "x": [1, 0], "extra": 1},
        {"x": [1, 0]},
        {"m": 2, "x": ["a", 0]},
        "[1, 2]",
        "not json",
    ],
)
def test_schema_violations(capsys, monkeypatch, doc):
    code, res, _ = run(capsys, monkeypatch, ["classify"], doc)
    assert code == 2 and res["status"] == "error" and res["code"] == "schema"


def test_non_finite_rejected(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["classify"], '{"m": 2, "x": [NaN, 0]}')
    assert code == 2


def test_missing_file(capsys):
    code = main(["classify", "/nonexistent/doc.json"])
    assert code == 2
    assert json.loads(capsys.readouterr().out)["code"] == "io"


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


# ---- member


def test_member_origin_branch(capsys, monkeypatch):
    doc = {"m": 3, "x": [0, 0, 0], "y": [0, 0, 0], "u": [1, -1, 1], "v": [0, 0, 1], "cone": "limiting"}
    code, res, _ = run(capsys, monkeypatch, ["member"], doc)
    assert code == 0 and res["member"] is True
    assert np.allclose(res["certificate"]["xi"], [1, 1, 0], atol=1e-9)
    assert res["certificate"]["alpha"] == pytest.approx(0.5)


@pytest.mark.parametrize("cone", ["proximal", "regular", "limiting"])
def test_member_zero_candidate(capsys, monkeypatch, cone):
    doc = {**EX31, "u": [0, 0, 0], "v": [0, 0, 0], "cone": cone}
    code, res, _ = run(capsys, monkeypatch, ["member"], doc)
    assert code == 0 and res["member"] is True


def test_member_proximal_example(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["member"], {**EX31_FULL, "cone": "proximal"})
    assert code == 0 and res["coneKind"] == "Proximal" and res["caseTag"] == "BdBd"


def test_member_non_member_exit_1(capsys, monkeypatch):
    doc = {"m": 2, "x": [1, 0], "y": [0, 0], "u": [1, 0], "v": [0, 0], "cone": "regular"}
    code, res, _ = run(capsys, monkeypatch, ["member"], doc)
    assert code == 1 and res["status"] == "ok" and res["member"] is False


def test_member_bad_cone(capsys, monkeypatch):
    code, _, _ = run(capsys, monkeypatch, ["member"], {**EX31_FULL, "cone": "frechet"})
    assert code == 2


# ---- calculus


def test_calculus_project(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["calculus", "project"], {"m": 3, "x": [0, 3, 4]})
    assert code == 0 and np.allclose(res["projection"], [2.5, 1.5, 2.0], atol=1e-15)


def test_calculus_jacobian_example(capsys, monkeypatch):
    x = list(np.array(EX31_FULL["x"]) - np.array(EX31_FULL["y"]))
    code, res, _ = run(capsys, monkeypatch, ["calculus", "jacobian"], {"m": 3, "x": x})
    expected = [[0.5, 1 / (2 * R2), 1 / (2 * R2)], [1 / (2 * R2), 5 / 12, 1 / 12], [1 / (2 * R2), 1 / 12, 5 / 12]]
    assert code == 0 and np.allclose(res["jacobian"], expected, atol=1e-12)


def test_calculus_jacobian_not_differentiable(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["calculus", "jacobian"], {"m": 2, "x": [1, 1]})
    assert code == 4 and res["status"] == "error"


def test_calculus_ddir_and_calmness(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["calculus", "ddir"], {"m": 2, "x": [1, 1], "h": [0, 1]})
    assert code == 0 and np.allclose(res["derivative"], [0.5, 0.5])
    code, res, _ = run(capsys, monkeypatch, ["calculus", "calmness"], {"m": 2, "x": [1, 1], "h": [0, 1]})
    assert code == 0 and len(res["ratios"]) == 5


# ---- verify


def test_verify_sweep_bdbd(capsys, monkeypatch):
    doc = {"caseTag": "BdBd", "pairs": 50, "candidates": 50, "seed": 7, "hSamples": 2000}
    code, res, _ = run(capsys, monkeypatch, ["verify"], doc)
    assert code == 0 and res["disagreements"] == 0


def test_verify_single_proximal(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["verify"], {**EX31_FULL, "oracle": "proximal"})
    assert code == 0 and res["verdict"] == "ConsistentMember" and res["closedForm"] is True


def test_verify_malformed_counts(capsys, monkeypatch):
    code, _, _ = run(capsys, monkeypatch, ["verify"], {"caseTag": "BdBd", "pairs": 0, "candidates": "x"})
    assert code == 2


# ---- sample


def test_sample_regular(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["sample", "--seed", "3"], {**EX31, "samples": 4})
    assert code == 0 and len(res["candidates"]) == 4


def test_sample_omega(capsys, monkeypatch):
    code, res, _ = run(capsys, monkeypatch, ["sample"], {**EX31, "samples": 5, "radius": 0.01})
    assert code == 0 and len(res["pairs"]) == 5


# ---- output contract


def test_floats_have_17_significant_digits(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps({"m": 3, "x": [0, 3, 4]})))
    main(["calculus", "project"])
    text = capsys.readouterr().out
    assert "2.5000000000000000e+00" in text


def test_round_trip_exact(capsys, monkeypatch):
    x = [0.1, 0.7, -0.3]
    code, res, _ = run(capsys, monkeypatch, ["calculus", "project"], {"m": 3, "x": x})
    from socnormal import project_soc

    assert res["projection"] == project_soc(x).tolist()


def test_byte_identical_output(capsys, monkeypatch):
    doc = {**EX31, "samples": 6, "seed": 11}
    outs = []
    for _ in range(2):
        monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(doc)))
        main(["sample", "--pretty"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["status"] == "ok"


def test_tol_flag_overrides(capsys, monkeypatch):
    # 8-digit input is not on bd K at a 1e-12 tolerance
    code, _, _ = run(capsys, monkeypatch, ["classify", "--tol", "1e-12"], EX31)
    assert code == 3


def test_module_entry_point(tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps({"m": 2, "x": [0, 0], "y": [1, 1]}))
    proc = subprocess.run(
        [sys.executable, "-m", "socnormal", "classify", str(path)], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["caseTag"] == "ZeroBd"
