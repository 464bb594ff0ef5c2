import json
import subprocess
import sys

import pytest

from arrayac.cli import main

from conftest import MODELS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def domains(text):
    out = {}
    for line in text.splitlines():
        name, sep, rest = line.partition(": ")
        if sep and rest.startswith("{"):
            out[name] = rest
    return out


@pytest.mark.parametrize("engine", ["naive", "arrac"])
def test_propagate_fig2(capsys, engine):
    code, out, _ = run(capsys, "propagate", MODELS / "fig2.arr", "--engine", engine)
    assert code == 0
    d = domains(out)
    assert d["x"] == "{p, r}" and d["y"] == "{l}"
    assert "status: stable" in out


@pytest.mark.parametrize("engine", ["naive", "arrac"])
def test_propagate_fig3(capsys, engine):
    code, out, _ = run(capsys, "propagate", MODELS / "fig3.arr", "--engine", engine)
    assert code == 0
    assert domains(out)["a[j]"] == "{p, r}"


def test_propagate_failure(capsys):
    code, out, _ = run(capsys, "propagate", MODELS / "contradiction.arr")
    assert code == 1
    assert domains(out)["x"] == "{}"
    assert "status: failure" in out


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "propagate", tmp_path / "missing.arr")[0] == 2
    bad = tmp_path / "bad.arr"
    bad.write_text("var x in {1};\nconstraint x = a[y,];\n")
    code, _, err = run(capsys, "propagate", bad)
    assert code == 2 and "bad.arr:2:" in err
    assert run(capsys, "propagate", MODELS / "xor.arr")[0] == 2
    assert run(capsys, "propagate", "--allow-nonlinear", MODELS / "xor.arr")[0] == 0
    assert run(capsys, "bogus")[0] == 2


def test_json_is_stable(capsys):
    first = run(capsys, "propagate", MODELS / "fig2.arr", "--json")[1]
    second = run(capsys, "propagate", MODELS / "fig2.arr", "--json")[1]
    assert first == second
    payload = json.loads(first)
    assert set(payload) == {"domains", "stats", "status"}
    assert payload["status"] == "stable"
    assert payload["domains"]["x"] == ["p", "r"]
    assert payload["stats"]["runs"] >= 1


def test_solve_all(capsys):
    code, out, _ = run(capsys, "solve", MODELS / "table2x3.arr", "--all", "--stats")
    assert code == 0
    assert "solutions: 3" in out and "backtracks:" in out


def test_solve_first_and_unsat(capsys):
    code, out, _ = run(capsys, "solve", MODELS / "table2x3.arr")
    assert code == 0 and "solutions: 1" in out
    code, out, _ = run(capsys, "solve", "--allow-nonlinear", MODELS / "xor.arr")
    assert code == 1 and "no solution" in out


def test_check_random(capsys):
    code, out, _ = run(capsys, "check", "--random", 200, "--seed", 3)
    assert code == 0
    assert "checked 200 model(s), 0 divergent" in out


def test_check_file(capsys):
    assert run(capsys, "check", MODELS / "fig2.arr")[0] == 0
    assert run(capsys, "check")[0] == 2


def test_bench_crossword(capsys):
    code, out, _ = run(
        capsys, "bench", "--crossword", MODELS / "classic.grid", MODELS / "classic.words", "--repeat", 3, "--json"
    )
    assert code == 0
    rows = json.loads(out)
    assert rows["arrac"]["cell_domain_reads"] <= rows["naive"]["cell_domain_reads"]


def test_crossword_toy(capsys):
    code, out, _ = run(capsys, "crossword", MODELS / "toy.grid", MODELS / "toy.words", "--stats")
    assert code == 0
    grid = out.splitlines()[:3]
    across = grid[0]
    down = "".join(row[1] for row in grid)
    words = {"CAT", "DOG", "ACE", "OAK"}
    assert across in words and down in words and across != down
    assert "backtracks:" in out


def test_crossword_unsat_and_bad_input(capsys, tmp_path):
    words = tmp_path / "w"
    words.write_text("ABC\nXYZ\n")
    code, out, _ = run(capsys, "crossword", MODELS / "toy.grid", words)
    assert code == 1 and "UNSAT" in out
    words.write_text("ABCDEFG\n")
    assert run(capsys, "crossword", MODELS / "toy.grid", words)[0] == 2


def test_crossword_emit_model_roundtrips(capsys, tmp_path):
    code, out, _ = run(capsys, "crossword", MODELS / "toy.grid", MODELS / "toy.words", "--emit-model")
    assert code == 0
    path = tmp_path / "toy.arr"
    path.write_text(out)
    code, out, _ = run(capsys, "solve", path, "--all")
    assert code == 0 and "solutions: 4" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "arrayac", "propagate", str(MODELS / "table2x3.arr")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "x: {B, C, D}" in proc.stdout
