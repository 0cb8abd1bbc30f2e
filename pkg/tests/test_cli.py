import json
import shutil
import subprocess
import sys

import pytest

from conftest import FIXTURE_NAMES, Z_DOC, fixture_path, loop_doc
from ggk.cli import main
from ggk.serialize import load


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_bs23(capsys):
    code, out, _ = run(capsys, "validate", fixture_path("bs23"))
    assert code == 0 and out.startswith("ok")


def test_reduce_example_byte_for_byte(capsys):
    code, out, _ = run(capsys, "reduce", fixture_path("bs23"), "--word", "e(l);g(v,[0,3]);E(l)")
    assert code == 0 and out == "g(v,[0,2])\n"


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_check_tree(capsys, name):
    code, out, _ = run(capsys, "check", fixture_path(name), "--lemma", "tree", "--radius", "4")
    assert code == 0 and out == "quotient ball is a tree, matches universal cover\n"


@pytest.mark.parametrize("lemma", ["edge-kernel", "stabilizers"])
def test_other_lemmas(capsys, lemma):
    code, out, _ = run(capsys, "--json", "check", fixture_path("theta"), "--lemma", lemma)
    assert code == 0 and json.loads(out)["lemma"] == lemma


def test_classify_and_present(capsys):
    code, out, _ = run(capsys, "classify", fixture_path("mixed_torsion"))
    assert code == 0 and "u: nonorientable, |F| = 2, G/F = Dinfty" in out
    code, out, _ = run(capsys, "present", fixture_path("bs23"))
    assert out.strip() == "< v.t, l | l*v.t^3*l^-1 = v.t^2 >"


def test_quotients_emit_documents(capsys, tmp_path):
    out_file = tmp_path / "q.json"
    code, _, _ = run(capsys, "quotient-fin", fixture_path("zxz2_loop"), "--out", str(out_file))
    assert code == 0
    g = load(str(out_file))
    assert g.vertex_groups["v"].finite_part.order == 1
    code, out, _ = run(capsys, "quotient-cyc", str(out_file))
    assert code == 0 and json.loads(out)["vertices"][0]["group"]["kind"] == "finite"


def test_tree_ball_dot(capsys, tmp_path):
    dot = tmp_path / "b.dot"
    code, out, _ = run(capsys, "tree-ball", fixture_path("z2_free_z3"), "--radius", "2", "--dot", str(dot))
    assert code == 0 and out.startswith("7 vertices, 6 edges")
    assert dot.read_text().startswith("graph ball {")


def test_certify_and_check(capsys, tmp_path):
    cert = tmp_path / "c.json"
    assert run(capsys, "certify", fixture_path("theta"), "--out", str(cert))[0] == 0
    assert run(capsys, "check-cert", str(cert))[0] == 0
    data = json.loads(cert.read_text())
    data["nodes"][0]["rule"] = "R6"
    cert.write_text(json.dumps(data))
    code, _, err = run(capsys, "--json", "check-cert", str(cert))
    assert code == 2 and json.loads(err)["error"] == "CheckFailed"


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 1 and err.startswith("error:")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(loop_doc(Z_DOC, Z_DOC, [[0, 0]], [[0, 1]])))
    code, _, err = run(capsys, "--json", "validate", str(bad))
    diag = json.loads(err)
    assert code == 1 and diag["issues"][0]["code"] == "NonInjectiveMono"
    code, _, err = run(capsys, "reduce", fixture_path("bs23"), "--word", "e(l")
    assert code == 1 and "WordSyntaxError" in err
    code, _, err = run(capsys, "quotient-fin", fixture_path("z2_free_z3"), "--json")
    assert code == 1 and json.loads(err)["error"] == "EdgeGroupFinite"
    bad.write_text("{not json")
    assert run(capsys, "check-cert", str(bad))[0] == 1


def test_deterministic_output(capsys):
    a = run(capsys, "certify", fixture_path("mixed_torsion"))[1]
    b = run(capsys, "certify", fixture_path("mixed_torsion"))[1]
    assert a == b


def test_coset_cap_env(monkeypatch, capsys):
    monkeypatch.setenv("GGK_COSET_CAP", "1")
    code, _, err = run(capsys, "reduce", fixture_path("bs23"), "--word", "g(v,[0,1]);e(l)")
    assert code == 1 and "EdgeCosetEnumerationCapExceeded" in err


@pytest.mark.skipif(shutil.which("ggk") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["ggk", "reduce", fixture_path("bs23"), "--word", "e(l);g(v,[0,3]);E(l)"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout == "g(v,[0,2])\n"
    p = subprocess.run([sys.executable, "-m", "ggk.cli", "validate", fixture_path("bs23")],
                       capture_output=True, text=True)
    assert p.returncode == 0
