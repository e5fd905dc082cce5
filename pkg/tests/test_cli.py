import io
import json
import subprocess
import sys

import pytest

from pprlab.cli import RunConfig, UsageError, bench_rows, main, run_command, to_json
from pprlab.graph import load_graph
from pprlab.lab import generate


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def single_loop(tmp_path):
    p = tmp_path / "single_loop.el"
    p.write_text("1 1\n0 0\n")
    return str(p)


@pytest.fixture
def path_file(tmp_path):
    p = tmp_path / "path.el"
    code, text, _ = run("generate", "--kind", "path", "--n", "256")
    assert code == 0
    p.write_text(text)
    return str(p)


def test_exact_singleton_prints_one(single_loop):
    code, out, _ = run("exact", "--graph", single_loop, "--target", "0")
    assert code == 0 and out == "1.0\n"


def test_exact_json_with_vector(path_file):
    code, out, _ = run("exact", "--graph", path_file, "--target", "255", "--vector", "--output", "json")
    d = json.loads(out)
    assert code == 0 and len(d["ppr"]) == 256 and d["ppr"][255] == pytest.approx(1.0)


def test_estimate_json_has_contract_fields(path_file):
    code, out, _ = run("estimate", "--graph", path_file, "--target", "255", "--alpha", "0.2", "--seed", "7",
                       "--output", "json")
    d = json.loads(out)
    assert code == 0
    for key in ("stop_round", "estimate", "query_totals", "rounds"):
        assert key in d
    assert d["query_totals"]["total"] == sum(v for k, v in d["query_totals"].items() if k != "total")


@pytest.mark.parametrize("cmd", [
    ["estimate", "--kind", "random", "--n", "300", "--seed", "4"],
    ["baseline", "--kind", "random", "--n", "300", "--r-max", "0.01", "--walks", "500"],
    ["smart", "--kind", "complete", "--n", "64"],
    ["complexity", "--kind", "star", "--n", "50", "--full"],
    ["exact", "--kind", "random", "--n", "40", "--vector"],
    ["surgery", "--kind", "path", "--n", "12", "--op", "subdivide", "--edge", "3", "4"],
])
def test_json_round_trip_and_determinism(cmd):
    code, out, _ = run(*cmd, "--output", "json")
    assert code == 0
    assert to_json(json.loads(out)) + "\n" == out
    assert run(*cmd, "--output", "json")[1] == out


def test_text_output_is_deterministic():
    cmd = ["estimate", "--kind", "random", "--n", "200", "--seed", "9"]
    assert run(*cmd)[1] == run(*cmd)[1]


def test_floats_keep_seventeen_digits():
    assert to_json(0.1) == "0.10000000000000001"
    assert to_json(2.0) == "2.0"
    assert to_json({"a": [1, float("nan")]}) == '{\n  "a": [\n    1,\n    NaN\n  ]\n}'


def test_generate_writes_loadable_file(tmp_path):
    out = tmp_path / "g.el"
    assert run("generate", "--kind", "random", "--n", "50", "--seed", "2", "--out", str(out))[0] == 0
    assert load_graph(out) == generate("random", 50, 2)


@pytest.mark.parametrize("argv", [
    [],
    ["nope"],
    ["exact"],
    ["exact", "--kind", "path"],
    ["exact", "--kind", "path", "--n", "5", "--target", "5"],
    ["exact", "--kind", "path", "--n", "5", "--alpha", "1.5"],
    ["estimate", "--kind", "path", "--n", "5", "--mode", "weird"],
    ["baseline", "--kind", "path", "--n", "5", "--r-max", "2", "--walks", "3"],
    ["bench", "--sizes", "40"],
    ["surgery", "--kind", "path", "--n", "5", "--op", "subdivide"],
    ["surgery", "--kind", "path", "--n", "5", "--op", "subdivide", "--edge", "3", "1"],
    ["validate", "--trials", "0"],
])
def test_bad_arguments_exit_one(argv):
    code, out, err = run(*argv)
    assert code == 1 and err.startswith("error:")


def test_malformed_graph_exits_one(tmp_path):
    p = tmp_path / "bad.el"
    p.write_text("3 1\n0 9\n")
    code, _, err = run("exact", "--graph", str(p))
    assert code == 1 and "line 2" in err


def test_missing_file_exits_one(tmp_path):
    assert run("exact", "--graph", str(tmp_path / "absent.el"))[0] == 1


def test_validate_passes_with_exit_zero():
    code, out, _ = run("validate", "--suite", "lemmas", "--seed", "3", "--trials", "20")
    assert code == 0
    assert out.count("PASS") == len(out.strip().splitlines())


def test_validate_failure_exits_two(monkeypatch):
    from pprlab import validators
    from pprlab.validators import CheckResult

    broken = CheckResult("forced", trials=1, violations=1, worst=1.0)
    monkeypatch.setattr(validators, "lemma_suite", lambda *a, **k: [broken])
    code, out, _ = run("validate", "--suite", "lemmas")
    assert code == 2 and out.startswith("FAIL")


def test_surgery_ops(tmp_path):
    out = tmp_path / "h.el"
    code, text, _ = run("surgery", "--kind", "path", "--n", "30", "--op", "funnel", "--set", "0", "1", "2", "3",
                        "--eps", "1.0", "--edge", "10", "11", "--output", "json", "--out", str(out))
    d = json.loads(text)
    assert code == 0 and d["pagerank_plus"] > d["pagerank_minus"]
    assert load_graph(out).n == 30
    code, text, _ = run("surgery", "--kind", "path", "--n", "6", "--op", "mu", "--set", "2", "--output", "json")
    assert json.loads(text) == {"mu": 3}
    code, text, _ = run("surgery", "--kind", "random", "--n", "40", "--op", "remove-in", "--vertex", "0",
                        "--output", "json")
    assert code == 0


def test_bench_rows_ordered_and_thread_independent(monkeypatch):
    a = bench_rows(["path", "star"], [6, 7], 4, 1, threads=1)
    b = bench_rows(["path", "star"], [6, 7], 4, 1, threads=3)
    assert a == b
    assert [r["graph"] for r in a] == ["path-64", "path-128", "star-64", "star-128"]
    monkeypatch.setenv("PPRLAB_THREADS", "2")
    code, out, _ = run("bench", "--kinds", "complete", "--sizes", "6", "--trials", "3", "--output", "json")
    assert code == 0 and json.loads(out)[0]["graph"] == "complete-64"


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("PPRLAB_THREADS", "many")
    assert run("bench", "--kinds", "path", "--sizes", "4", "--trials", "1")[0] == 1


def test_run_config_invariants():
    with pytest.raises(UsageError):
        RunConfig(alpha=0.0)
    with pytest.raises(UsageError):
        RunConfig(trials=0)


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0


def test_module_entry_point(single_loop):
    res = subprocess.run([sys.executable, "-m", "pprlab", "exact", "--graph", single_loop],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "1.0\n"
