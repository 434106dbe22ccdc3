import io
import json
import subprocess
import sys

import pytest

from helpers import SMALL_TREE, split_chain, looping_chain
from probsafe.cli import BUDGET, FAILS, INPUT_ERROR, OK, UNKNOWN, run
from probsafe.markov import load_mc, save_mc


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, mc in [("split_chain", split_chain()), ("looping_chain", looping_chain())]:
        p = tmp_path / f"{name}.mc"
        p.write_text(save_mc(mc))
        paths[name] = str(p)
    tree = tmp_path / "t1.tree"
    tree.write_text(SMALL_TREE)
    paths["tree"] = str(tree)
    c = tmp_path / "c.tree"
    c.write_text("(1,c)\n")
    paths["c"] = str(c)
    formulas = tmp_path / "phi.pctl"
    formulas.write_text("# comment\n!P<0.5[a U b]\nP<=0.5[F c]\n")
    paths["formulas"] = str(formulas)
    return paths


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_check_examples(files):
    assert call("check", "--mc", files["looping_chain"], "P>=0.5[a U b]")[:2] == (OK, "true (prob = 1/2)\n")
    assert call("check", "--mc", files["split_chain"], "P>=0.5[a U b]")[:2] == (FAILS, "false (prob = 0)\n")
    assert call("check", "--mc", files["looping_chain"], "a")[:2] == (OK, "true\n")


def test_classify(files):
    code, out, _ = call("classify", "P<=0.5[a U b]")
    assert code == OK
    assert "safe: In" in out.splitlines()
    assert call("classify", "P>=0.5[a U b]", "--fragment", "safe")[0] == FAILS
    gap = "P>=0.5[(P>=1[F a] & P>=1[F (!a & !b)]) U P>=1[G (!a & b)]]"
    assert call("classify", gap, "--fragment", "live_gt_guarded")[0] == UNKNOWN
    assert call("classify", gap, "--fragment", "live_gt")[0] == OK


def test_structured_output_is_json(files):
    code, out, _ = call("--format", "structured", "classify", "P>0.5[F b]")
    data = json.loads(out)
    assert data["live_lt"] == {"verdict": "In"}
    code, out, _ = call("check", "--mc", files["looping_chain"], "P>=0.5[a U b]", "--format", "structured")
    assert json.loads(out) == {"holds": True, "prob": "1/2"}


def test_parse_and_decompose(files):
    code, out, _ = call("parse", files["formulas"])
    assert (code, out) == (OK, "P>=0.5[a U b]\nP<=0.5[true U c]\n")
    code, out, _ = call("decompose", "P>=0.5[a U b]")
    assert code == OK
    assert out.splitlines()[:2] == ["safe: P>=0.5[a W b]", "live: P>=0.5[a U b] | P<0.5[a W b]"]
    assert call("decompose", "--budget", "3", "(P>=0.5[X a] & P>=0.5[X b]) | (P>=0.5[X c] & P>=0.2[X a])")[0] == BUDGET


def test_formula_from_file(tmp_path, files):
    f = tmp_path / "one.pctl"
    f.write_text("P<=0.5[a U b]\n")
    assert call("classify", "--file", str(f))[0] == OK
    assert call("classify", "--file", files["formulas"])[0] == INPUT_ERROR


def test_ctl_and_simulate(files):
    code, out, _ = call("ctl", "--mc", files["looping_chain"], "EF b")
    assert (code, out) == (OK, "true\nstates: 0 1\n")
    code, out, _ = call("simulate", "--mc", files["split_chain"], "--against", files["looping_chain"], "--pair", "0,3")
    assert (code, out) == (FAILS, "0 ≾ 3: false\n")
    code, out, _ = call("simulate", "--mc", files["looping_chain"])
    assert code == OK and "0 ≾ 0" in out
    code, out, _ = call("simulate", "--mc", files["looping_chain"], "--pair", "1,1", "--format", "structured")
    assert json.loads(out)["weights"] == [[1, 1, "1"]]


def test_counterexample(files):
    code, out, _ = call("counterexample", "--mc", files["looping_chain"], "P<=0.49[a U b]")
    assert code == FAILS
    assert out.splitlines() == ["counterexample for P<=0.49[a U b]: mass 0.496", "0 1", "0 0 1", "0 0 0 1"]
    assert call("counterexample", "--mc", files["looping_chain"], "P<=0.5[a U b]")[0] == OK
    assert call("counterexample", "--mc", files["looping_chain"], "--budget", "1", "P<=0.49[a U b]")[0] == BUDGET
    code, out, _ = call("counterexample", "--mc", files["looping_chain"], "P<=0.49[a U b]", "--format", "structured")
    assert json.loads(out)["verified"] is True


def test_oracle(files):
    code, out, _ = call("oracle", "--tree", files["c"], "--formula", "P>=0.5[a U b]")
    assert code == FAILS and out.startswith("no witness in family")
    code, out, _ = call("oracle", "--tree", files["tree"], "--formula", "P>=0.5[F d]")
    assert code == OK and out.startswith("witness")
    assert call("oracle", "--tree", files["c"], "--formula", "P>=0.5[a U b]", "--max-states", "4")[0] == BUDGET


def test_gen_is_deterministic():
    first = call("--seed", "7", "gen", "--states", "5")
    second = call("gen", "--states", "5", "--seed", "7")
    assert first == second and first[0] == OK
    assert load_mc(first[1]).n == 5
    assert call("gen", "--states", "5", "--seed", "8")[1] != first[1]


def test_input_errors(files, tmp_path):
    assert call()[0] == INPUT_ERROR
    assert call("check", "--mc", files["looping_chain"], "P>=[a]")[0] == INPUT_ERROR
    assert call("check", "--mc", str(tmp_path / "missing.mc"), "a")[0] == INPUT_ERROR
    bad = tmp_path / "bad.mc"
    bad.write_text(save_mc(looping_chain()).replace("0:0.2", "0:0.3"))
    code, _, err = call("check", "--mc", str(bad), "a")
    assert code == INPUT_ERROR and "sum" in err
    assert call("simulate", "--mc", files["looping_chain"], "--pair", "0,9")[0] == INPUT_ERROR
    assert call("classify", "P>0.5[F b]", "--fragment", "nope")[0] == INPUT_ERROR
    assert call("decompose", "P>0.5[F b]")[0] == INPUT_ERROR


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "probsafe", "check", "--mc", files["looping_chain"], "P>=0.5[a U b]"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "true (prob = 1/2)\n"
