import json
import subprocess
import sys

import pytest

from vcut import bench
from vcut.cli import main
from vcut.graph import Graph, cycle_graph, clique_graph, emit_edge_list, parse_edge_list, petersen_graph
from vcut.oracle import verify_cut


def write(tmp_path, name, g):
    p = tmp_path / name
    p.write_text(emit_edge_list(g))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_cycle_file(tmp_path, capsys):
    out_file = tmp_path / "c8.el"
    code, out, err = run(capsys, "gen", "--family", "cycle", "--n", "8", "--out", str(out_file))
    assert code == 0 and err == ""
    assert out_file.read_text().startswith("8 8\n")
    assert parse_edge_list(out_file.read_text()) == cycle_graph(8)
    assert json.loads(out)["diameter"] == 4


def test_gen_planted_exact(capsys):
    code, out, _ = run(capsys, "gen", "--family", "planted", "--a", "6", "--k", "2", "--b", "6", "--seed", "1", "--exact")
    doc = json.loads(out)
    assert code == 0 and doc["connectivity"] == 2 and len(doc["planted_cut"]) == 2


def test_gen_bad_params(capsys):
    code, out, err = run(capsys, "gen", "--family", "clique", "--n", "0")
    assert code == 2 and out == "" and "clique" in err


def test_oracle_examples(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", write(tmp_path, "c10", cycle_graph(10)), "--kappa", "1")
    assert code == 0 and json.loads(out)["verdict"] == "none"
    star = Graph(5, [(0, i) for i in range(1, 5)])
    code, out, _ = run(capsys, "oracle", write(tmp_path, "star", star), "--kappa", "1")
    doc = json.loads(out)
    assert doc["verdict"] == "cut" and doc["cut"] == [0] and doc["connectivity_leq"] is True
    code, out, _ = run(capsys, "oracle", write(tmp_path, "pet", petersen_graph()), "--kappa", "3")
    doc = json.loads(out)
    assert doc["verdict"] == "cut" and len(doc["cut"]) == 3
    assert verify_cut(petersen_graph(), doc["cut"])


def test_simulate_examples(tmp_path, capsys):
    f = write(tmp_path, "c10", cycle_graph(10))
    code, out, err = run(capsys, "simulate", f, "--kappa", "2", "--seed", "7", "--algo", "main")
    rec = json.loads(out)
    assert code == 0 and err == ""
    assert rec["verdict"] == "cut" and rec["verified"] is True and rec["match"] is True
    code, out, _ = run(capsys, "simulate", write(tmp_path, "k6", clique_graph(6)), "--kappa", "4", "--algo", "baseline")
    assert code == 0 and json.loads(out)["verdict"] == "none"
    code, out, _ = run(capsys, "simulate", f, "--kappa", "2", "--max-rounds", "1")
    assert code == 5 and json.loads(out)["verdict"] == "timeout"


def test_simulate_envelope_ratio_by_hand(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", write(tmp_path, "c10", cycle_graph(10)), "--kappa", "2", "--seed", "7")
    rec = json.loads(out)
    # C10: D = 5, log2(10)^3 = 38.59..., sqrt(10) = 3.162...
    expected = rec["rounds_used"] / (8 * (5 + 10 ** 0.5) * 3.321928094887362 ** 3)
    assert rec["D"] == 5
    assert rec["envelope_ratio"] == pytest.approx(expected, rel=1e-12)


def test_simulate_errors(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", write(tmp_path, "dis", Graph(4, [(0, 1), (2, 3)])), "--kappa", "1")
    assert code == 3 and "disconnected" in err
    bad = tmp_path / "bad.el"
    bad.write_text("3 1\n0 0\n")
    code, out, err = run(capsys, "simulate", str(bad), "--kappa", "1")
    assert code == 2 and out == "" and "line 2" in err
    code, _, _ = run(capsys, "simulate", str(tmp_path / "missing.el"), "--kappa", "1")
    assert code == 2
    code, _, _ = run(capsys, "simulate", write(tmp_path, "c5", cycle_graph(5)), "--kappa", "4")
    assert code == 2
    code, _, _ = run(capsys, "simulate", write(tmp_path, "c6", cycle_graph(6)), "--kappa", "2", "--algo", "kappa1")
    assert code == 2
    code, _, _ = run(capsys, "simulate", write(tmp_path, "c7", cycle_graph(7)), "--kappa", "2", "--max-rounds", "0")
    assert code == 2


def test_max_rounds_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(bench.MAX_ROUNDS_ENV, "2")
    code, out, _ = run(capsys, "simulate", write(tmp_path, "c10", cycle_graph(10)), "--kappa", "2")
    assert code == 5
    monkeypatch.setenv(bench.MAX_ROUNDS_ENV, "abc")
    code, _, _ = run(capsys, "simulate", write(tmp_path, "c10", cycle_graph(10)), "--kappa", "2")
    assert code == 2


def test_bench_empty_corpus(tmp_path, capsys):
    corpus = tmp_path / "empty.json"
    corpus.write_text(json.dumps({"instances": []}))
    code, out, _ = run(capsys, "bench", "--corpus", str(corpus), "--seeds", "3")
    doc = json.loads(out)
    assert code == 0 and doc["records"] == [] and doc["summary"]["runs"] == 0


def test_bench_cliques(tmp_path, capsys):
    corpus = tmp_path / "k.json"
    corpus.write_text(json.dumps({"instances": [{"family": "clique", "n": [5, 6, 7], "kappas": [1, 2, 3]}]}))
    out_file = tmp_path / "report.json"
    code, out, _ = run(capsys, "bench", "--corpus", str(corpus), "--seeds", "2", "--algo", "main",
                       "--algo", "baseline", "--out", str(out_file))
    assert code == 0
    summary = json.loads(out)
    report = bench.BenchReport.from_json(json.loads(out_file.read_text()))
    assert summary == report.summary
    assert len(report.records) == 3 * 3 * 2 * 2
    assert all(r.verdict == "none" for r in report.records)
    assert summary["mismatches"] == 0


def test_bench_bad_corpus(tmp_path, capsys):
    corpus = tmp_path / "bad.json"
    corpus.write_text("{nope")
    assert run(capsys, "bench", "--corpus", str(corpus))[0] == 2
    corpus.write_text(json.dumps({"instances": [{"family": "cycle", "n": 5}]}))
    assert run(capsys, "bench", "--corpus", str(corpus))[0] == 2
    corpus.write_text(json.dumps({"instances": [{"family": "cycle", "n": 5, "kappas": [4]}]}))
    assert run(capsys, "bench", "--corpus", str(corpus))[0] == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "c10", cycle_graph(10))
    proc = subprocess.run([sys.executable, "-m", "vcut", "oracle", f, "--kappa", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stderr == ""
    assert json.loads(proc.stdout)["verdict"] == "cut"
