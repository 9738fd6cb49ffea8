import json

import pytest

from srpa.cli import main
from conftest import FIXTURES


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_equiv_commutative(capsys):
    code, out, _ = run(capsys, "equiv", "a.(b||c).a", "a.(c||b).a")
    assert code == 0 and out.strip() == "equivalent"


def test_equiv_false_and_oracle(capsys):
    code, out, _ = run(capsys, "equiv", "a||b", "a.b", "--oracle", "3")
    assert code == 1 and out.strip() == "not equivalent"


def test_member_pa(capsys):
    code, out, _ = run(capsys, "member", "--pa", str(FIXTURES / "sequence_fork.json"), "--state", "q0", "a.(b||c).a")
    assert code == 0 and out.strip() == "member"


def test_member_expr(capsys):
    code, out, _ = run(capsys, "member", "--expr", "a*", "a.a.b")
    assert code == 1 and out.strip() == "not a member"


def test_check_run_confusion(capsys):
    code, out, _ = run(capsys, "check", str(FIXTURES / "run_confusion.json"))
    assert code == 1
    assert "well-structured=false" in out and "parsimonious=false" in out


def test_json_output(capsys):
    code, out, _ = run(capsys, "--json", "check", str(FIXTURES / "run_confusion.json"))
    data = json.loads(out)
    assert list(data) == ["command", "inputs", "result", "details"]
    assert data["result"] is False and data["details"]["parsimonious"] is False


def test_normalize_then_check(tmp_path, capsys):
    out_file = tmp_path / "ws.json"
    code, _, _ = run(capsys, "normalize", str(FIXTURES / "run_confusion.json"), "-o", str(out_file), "--track", "q1")
    assert code == 0
    code, out, _ = run(capsys, "check", str(out_file))
    assert code == 0 and "well-structured=true" in out and "fork-acyclic=true" in out
    code, out, _ = run(capsys, "member", "--pa", str(out_file), "--state", "q1", "a")
    assert code == 0


def test_compile_extract_atoms(tmp_path, capsys):
    out_file = tmp_path / "e.json"
    code, out, _ = run(capsys, "compile", "a . b* || c", "-o", str(out_file))
    assert code == 0 and "root state 'a . b* || c'" in out
    code, out, _ = run(capsys, "extract", str(out_file), "--state", "a . b* || c")
    assert code == 0 and out.strip()
    code, out, _ = run(capsys, "atoms", str(FIXTURES / "distributivity.json"))
    assert code == 0 and "{q2, q2', q4}  [fork member]" in out


def test_lang(capsys):
    code, out, _ = run(capsys, "lang", "a*", "--max-size", "2")
    assert code == 0 and out.splitlines() == ["1", "a", "a . a"]


def test_output_is_deterministic(capsys):
    first = run(capsys, "--json", "atoms", str(FIXTURES / "hidden_choice.json"))
    second = run(capsys, "--json", "atoms", str(FIXTURES / "hidden_choice.json"))
    assert first == second


@pytest.mark.parametrize(
    "argv",
    [
        ["equiv", "a +", "b"],
        ["member", "--pa", "missing.json", "--state", "q", "a"],
        ["member", "--expr", "a", "--state", "q", "a"],
        ["lang", "a", "--max-size", "99"],
        ["frobnicate"],
        ["check", str(FIXTURES / "sequence_fork.json"), "extra"],
    ],
)
def test_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_atoms_rejects_non_well_structured(capsys):
    code, _, err = run(capsys, "atoms", str(FIXTURES / "run_confusion.json"))
    assert code == 2 and "well-structured" in err
