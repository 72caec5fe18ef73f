import json

import pytest

from ftgossip.cli import main
from ftgossip.core import parse_schedule
from ftgossip.schedules import build_asymmetric, build_hypercube


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_prints_counts(capsys):
    code, out, _ = run(capsys, "build", "--type", "hypercube", "--m", "2")
    assert code == 0
    assert "# updates: 8" in out and "# steps: 4" in out
    assert parse_schedule(out) == build_hypercube(2)
    code, out, _ = run(capsys, "build", "--type", "asym", "--n", "3")
    assert "# updates: 5" in out and parse_schedule(out) == build_asymmetric(3)
    code, out, _ = run(capsys, "build", "--type", "hypercube", "--m", "0")
    assert code == 0 and len(parse_schedule(out)) == 0


@pytest.mark.parametrize("argv", [["build", "--type", "hypercube", "--n", "4"], ["build", "--type", "asym"],
                                  ["build", "--type", "cube", "--m", "2"], ["build", "--type", "asym", "--n", "0"], []])
def test_build_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_build_then_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "h3.txt"
    code, out, _ = run(capsys, "build", "--type", "hypercube", "--m", "3", "-o", str(path))
    assert code == 0 and "updates: 24" in out
    assert parse_schedule(path.read_text()) == build_hypercube(3)
    code, out, _ = run(capsys, "verify", str(path), "--json")
    rep = json.loads(out)["results"]
    assert code == 0
    assert rep["consensus"] and rep["updates"] == 24 and rep["beta"] == ["1/2^3"] * 8
    assert all(rep["invariants"][k] for k in ("row_sums", "diagonal_bound", "column_sums", "rank_dichotomy"))


def test_verify_mixed_and_failure(tmp_path, capsys):
    path = tmp_path / "a5.txt"
    path.write_text(open_schedule := "n 5\nS 1 5\nA 5 3\nS 1 3\nS 2 4\nA 5 2\nS 1 2\nS 3 4\n")
    code, out, _ = run(capsys, "verify", str(path), "--json")
    rep = json.loads(out)["results"]
    assert code == 0 and rep["updates"] == 12
    assert sorted(rep["beta"]) == sorted(["1/2^2"] * 3 + ["1/2^3"] * 2)
    assert parse_schedule(open_schedule) == build_asymmetric(5)
    bad = tmp_path / "bad.txt"
    bad.write_text("n 3\nS 1 2\n")
    code, out, _ = run(capsys, "verify", str(bad))
    assert code == 1 and "consensus: no" in out


def test_verify_parse_error_has_line(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("n 3\nS 1 2\nS 1 9\n")
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and "line 3" in err
    code, _, err = run(capsys, "verify", str(tmp_path / "missing.txt"))
    assert code == 2


def test_simulate(tmp_path, capsys):
    sched = tmp_path / "a3.txt"
    sched.write_text("n 3\nS 1 3\nA 3 2\nS 1 2\n")
    x = tmp_path / "x.txt"
    x.write_text("0\n1\n2\n")
    code, out, _ = run(capsys, "simulate", str(sched), str(x), "--json")
    rep = json.loads(out)["results"]
    assert code == 0 and rep["final"] == ["1", "1", "1"]
    x.write_text("5/2^1\n5/2\n5/2\n")
    code, out, _ = run(capsys, "simulate", str(sched), str(x), "--json")
    assert json.loads(out)["results"]["consensus_step"] == 0
    h = tmp_path / "h2.txt"
    h.write_text("n 4\nS 1 3\nS 2 4\nS 1 2\nS 3 4\n")
    x.write_text("0\n0\n0\n4\n")
    code, out, _ = run(capsys, "simulate", str(h), str(x), "--trace")
    assert code == 0 and "final: 1 1 1 1" in out
    x.write_text("1\n2\n")
    code, _, err = run(capsys, "simulate", str(h), str(x))
    assert code == 2 and "n=4" in err


def test_search_command(capsys):
    code, out, _ = run(capsys, "search", "--n", "3", "--mode", "asym", "--budget", "8", "--witnesses", "--json")
    rep = json.loads(out)["results"]
    assert code == 0 and rep["min_updates"] == 5 and rep["witnesses"]
    code, out, _ = run(capsys, "search", "--n", "3", "--mode", "sym", "--budget", "6")
    assert code == 0 and "none within budget" in out
    code, _, _ = run(capsys, "search", "--n", "1")
    assert code == 2


def test_lemma_f_command(capsys):
    code, out, _ = run(capsys, "lemma-f", "--n", "6", "--json")
    rep = json.loads(out)["results"]
    assert code == 0
    assert (rep["n"], rep["m"], rep["r"], rep["min"]) == (6, 2, 2, 16)
    assert rep["witness"] == ["1/2^2"] * 2 + ["1/2^3"] * 4


def test_beta_report_command(capsys):
    code, out, _ = run(capsys, "beta-report", "--n", "5", "--approx")
    assert code == 0 and "linf: 3/40 (~0.075)" in out


def test_quantum_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "quantum", "--n", "2", "--components", "--json")
    rep = json.loads(out)["results"]
    assert code == 0 and rep["tau0"] == rep["components"] == 10
    swaps = tmp_path / "sw.txt"
    swaps.write_text("1 2\n")
    code, out, _ = run(capsys, "quantum", "--n", "2", "--simulate", str(swaps), "--rho", "diag:|01><01|", "--json")
    rep = json.loads(out)["results"]
    assert code == 0 and {t["element"] for t in rep["rho"]} == {"|01><01|", "|10><10|"}
    code, out, _ = run(capsys, "quantum", "--n", "3", "--impossibility", "--confirm-depth", "4", "--json")
    rep = json.loads(out)["results"]
    assert rep["flagged"] == [3] and rep["certificates"][0]["no_consensus"]
    code, _, _ = run(capsys, "quantum", "--n", "4", "--components")
    assert code == 2
    code, _, _ = run(capsys, "quantum", "--n", "2", "--simulate", str(swaps), "--rho", "|0><1|")
    assert code == 2
