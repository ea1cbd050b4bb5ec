import subprocess
import sys
from pathlib import Path

import pytest

from otmreal.cli import main

GOLDEN = Path(__file__).parent / "golden"

# name -> argv; the expected stdout and exit status live in golden/<name>.out
CASES = {
    "encode": ["encode", "{{}}"],
    "decode": ["decode", "code(bound=2,{2})"],
    "pair": ["pair", "1", "2"],
    "unpair": ["pair", "--unpair", "w*2+3"],
    "eval": ["eval", "forall y in a. y in b", "--let", "a=ord(2)", "--let", "b=ord(3)"],
    "run-halter": ["run", "halter", "--input", "{0,3}"],
    "run-sweeper-trace": ["--trace", "run", "sweeper"],
    "run-counter": ["run", "counter"],
    "check": ["check", "e = e | false", "(tag 0 (triv))", "--let", "e={}"],
    "extract-skk": ["extract", "--name", "skk"],
    "axioms": ["axioms"],
    "axioms-empty": ["axioms", "empty", "--check"],
    "demo-collection": ["demo", "collection"],
    "demo-regularity": ["demo", "regularity"],
}


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, _ = run_cli(CASES[name], capsys)
    assert f"{out}[exit {code}]\n" == (GOLDEN / f"{name}.out").read_text()


def test_errors_exit_nonzero(capsys, tmp_path):
    code, _, err = run_cli(["decode", "code(bound=1,{0})"], capsys)
    assert code == 2 and "error:" in err
    proof = tmp_path / "bad.proof"
    proof.write_text('(gen x (ax a1 "x in a" "b = b"))\n')
    code, _, err = run_cli(["extract", str(proof)], capsys)
    assert code == 2 and "side condition" in err
    code, out, _ = run_cli(["axioms", "power_set", "--check"], capsys)
    assert code == 1 and out.startswith("refused: power_set:")
    assert run_cli(["eval", "false"], capsys)[0] == 1
    assert run_cli(["run", "flipflop"], capsys)[0] == 1


@pytest.mark.parametrize("key, flag, shown", [
    ("universe_rank", "--universe-rank", "universe=V{}"),
    ("samples", "--samples", "samples={}"),
])
def test_config_precedence(key, flag, shown, capsys, tmp_path):
    argv = ["axioms", "empty", "--check"]
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"# settings\n{key} = 3\n")
    default = 4 if key == "universe_rank" else 32
    assert shown.format(default) in run_cli(argv, capsys)[1]
    assert shown.format(3) in run_cli(["--config", str(cfg)] + argv, capsys)[1]
    assert shown.format(2) in run_cli(["--config", str(cfg), flag, "2"] + argv, capsys)[1]


def test_vm_steps_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("vm_steps = 500\n")
    assert "clock=100000" in run_cli(["run", "counter"], capsys)[1]
    assert "clock=500" in run_cli(["--config", str(cfg), "run", "counter"], capsys)[1]
    assert "clock=70" in run_cli(["--config", str(cfg), "--vm-steps", "70", "run", "counter"], capsys)[1]


def test_trace_from_config(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("trace = true\n")
    assert "LIMIT" in run_cli(["--config", str(cfg), "run", "sweeper"], capsys)[1]
    assert "LIMIT" not in run_cli(["run", "sweeper"], capsys)[1]


def test_config_rejects_unknown_and_nonpositive(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    code, _, err = run_cli(["--config", str(bad), "encode", "{}"], capsys)
    assert code == 2 and "unknown key" in err
    bad.write_text("vm_steps = 0\n")
    assert run_cli(["--config", str(bad), "encode", "{}"], capsys)[0] == 2


def test_vacuous_implication_demo(capsys):
    code, out, _ = run_cli(["demo", "vacuous-implication"], capsys)
    assert code == 0
    assert "candidates for the antecedent that survive: 0" in out
    assert out.rstrip().endswith("VERIFIED[universe=V4,samples=32]")


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "otmreal", "pair", "2", "1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout == "7\n"


def test_readme_table_matches_command():
    readme = (Path(__file__).parent.parent / "README.md").read_text()
    table = (GOLDEN / "axioms.out").read_text().rsplit("[exit", 1)[0]
    assert table in readme
