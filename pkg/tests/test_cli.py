import json
import subprocess
import sys

import pytest

from thd import write_network
from thd.cli import main

from conftest import make_g1


@pytest.fixture
def g1_file(tmp_path):
    path = tmp_path / "g1.json"
    path.write_bytes(write_network(make_g1(), name="g1"))
    return str(path)


def test_validate_ok(g1_file, capsys):
    assert main(["validate", g1_file]) == 0
    out = capsys.readouterr().out
    assert "4 vertices, 3 edges" in out
    assert "[1, 5]" in out


def test_validate_json(g1_file, capsys):
    assert main(["validate", g1_file, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["vertices"] == 4
    assert doc["edges"] == 3
    assert doc["participant_histogram"] == {"2": 2, "3": 1}


def test_validate_empty_edges(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_bytes(b'{"schema":1,"name":"e","edges":[]}')
    assert main(["validate", str(path)]) == 0
    assert "0 vertices, 0 edges" in capsys.readouterr().out


def test_validate_bad_record_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_bytes(
        b'{"edges":[{"id":"e","participants":["a","b"],"start":9,"end":1}]}'
    )
    assert main(["validate", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_validate_lenient_skips(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_bytes(
        b'{"edges":['
        b'{"id":"e","participants":["a","b"],"start":9,"end":1},'
        b'{"id":"f","participants":["a","b"],"start":1,"end":2}]}'
    )
    assert main(["validate", str(path), "--lenient"]) == 0
    out = capsys.readouterr().out
    assert "2 vertices, 1 edges" in out
    assert "skipped 1 invalid record" in out


def test_missing_file_exits_1(capsys):
    assert main(["validate", "/nonexistent/net.json"]) == 1


def test_query_foremost(g1_file, capsys):
    assert main(["query", g1_file, "--source", "a", "--target", "c", "--t0", "0"]) == 0
    out = capsys.readouterr().out
    assert "foremost(a -> c) = 2" in out
    assert "e1 -> b @ 1" in out
    assert "e2 -> c @ 2" in out


def test_query_self_is_zero(g1_file, capsys):
    assert main(["query", g1_file, "--source", "a", "--target", "a", "--metric", "shortest"]) == 0
    assert "shortest(a -> a) = 0" in capsys.readouterr().out


def test_query_unreached_exit_code(g1_file, capsys):
    assert main(["query", g1_file, "--source", "a", "--target", "z"]) == 4
    assert "unreached" in capsys.readouterr().err


def test_query_json(g1_file, capsys):
    assert main(
        ["query", g1_file, "--source", "a", "--target", "d", "--metric", "fastest", "--json"]
    ) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == 0
    assert doc["walk"]["departure"] == 4


def test_query_unknown_metric_is_usage_error(g1_file):
    with pytest.raises(SystemExit) as exc:
        main(["query", g1_file, "--source", "a", "--target", "b", "--metric", "quickest"])
    assert exc.value.code == 2


def test_simulate_writes_result_file(g1_file, tmp_path, capsys):
    out = tmp_path / "result.json"
    assert main(["simulate", g1_file, "-o", str(out), "--t0", "0"]) == 0
    doc = json.loads(out.read_bytes())
    assert len(doc["sources"]) == 4
    assert doc["summary"]["quantiles"]["foremost"] == {"p50": 2, "p90": 4, "p99": 4}


def test_simulate_csv(g1_file, tmp_path):
    out = tmp_path / "result.csv"
    assert main(["simulate", g1_file, "-o", str(out), "--t0", "0", "--format", "csv"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 17


def test_simulate_deterministic_across_parallelism(g1_file, tmp_path):
    outs = []
    for degree in ("1", "3"):
        out = tmp_path / f"r{degree}.json"
        assert main(
            ["simulate", g1_file, "-o", str(out), "--t0", "0", "--parallel", degree,
             "--metric", "foremost", "--metric", "fastest"]
        ) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_simulate_explicit_sources_and_horizon(g1_file, tmp_path):
    out = tmp_path / "r.json"
    assert main(
        ["simulate", g1_file, "-o", str(out), "--t0", "0", "--sources", "a,b", "--horizon", "3"]
    ) == 0
    doc = json.loads(out.read_bytes())
    assert [s["source"] for s in doc["sources"]] == ["a", "b"]
    assert doc["sources"][0]["metrics"]["foremost"]["values"] == {"a": 0, "b": 1, "c": 2}


def test_simulate_bad_checkpoint_exits_1(g1_file, tmp_path, capsys):
    ck = tmp_path / "ck"
    ck.write_bytes(b"garbage\n")
    out = tmp_path / "r.json"
    assert main(["simulate", g1_file, "-o", str(out), "--t0", "0", "--checkpoint", str(ck)]) == 1
    assert "error:" in capsys.readouterr().err


def test_thd_threads_env_sets_default(g1_file, tmp_path, monkeypatch):
    monkeypatch.setenv("THD_THREADS", "2")
    out = tmp_path / "r.json"
    assert main(["simulate", g1_file, "-o", str(out), "--t0", "0"]) == 0
    monkeypatch.setenv("THD_THREADS", "bogus")
    out2 = tmp_path / "r2.json"
    assert main(["simulate", g1_file, "-o", str(out2), "--t0", "0"]) == 0
    assert out.read_bytes() == out2.read_bytes()


def test_gen_random_then_validate(tmp_path, capsys):
    out = tmp_path / "net.json"
    assert main(["gen", "-o", str(out), "--vertices", "30", "--edges", "90", "--seed", "4"]) == 0
    assert main(["validate", str(out)]) == 0
    assert "30 vertices, 90 edges" in capsys.readouterr().out


def test_gen_seed_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["gen", "-o", str(p), "--vertices", "20", "--edges", "50", "--seed", "9"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_structured_chain(tmp_path, capsys):
    out = tmp_path / "chain.json"
    assert main(["gen", "-o", str(out), "--shape", "chain", "--size", "5"]) == 0
    assert main(["query", str(out), "--source", "v0", "--target", "v5", "--metric", "shortest"]) == 0
    assert "shortest(v0 -> v5) = 5" in capsys.readouterr().out


def test_gen_invalid_params_exit_1(tmp_path):
    assert main(["gen", "-o", str(tmp_path / "x"), "--vertices", "1", "--edges", "3"]) == 1


def test_verify_seeded_trials(capsys):
    assert main(["verify", "--trials", "15", "--seed", "77"]) == 0
    assert "15 trial(s), 0 mismatch(es)" in capsys.readouterr().out


def test_verify_input_file(g1_file, capsys):
    assert main(["verify", g1_file, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["ok"] is True


def test_verify_refuses_large_input(tmp_path, capsys):
    from thd import GenParams, gen_random

    big = tmp_path / "big.json"
    big.write_bytes(write_network(gen_random(GenParams(vertex_count=30, edge_count=60, seed=0))))
    assert main(["verify", str(big)]) == 1


def test_bench_small(capsys):
    assert main(
        ["bench", "--vertices", "60", "--edges", "200", "--sources", "5", "--json"]
    ) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["sources"] == 5
    assert doc["peak_rss_mib"] > 0
    assert doc["simulate_seconds"] >= 0


def test_usage_error_unknown_command():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_console_entry_point(g1_file):
    proc = subprocess.run(
        [sys.executable, "-m", "thd.cli", "validate", g1_file],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "4 vertices" in proc.stdout
