import csv
import io
import json

import pytest

from hypercount.cli import run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def test_count():
    code, out = call("count", "--r", "3", "--m", "2", "--d", "2")
    obj = json.loads(out)
    assert code == 0 and obj["count_exact"] == "8" and obj["method"] in ("dp", "brute", "dft")


def test_count_methods_and_lambda():
    for method in ("brute", "dp", "dft", "integral"):
        code, out = call("count", "--r", "3", "--m", "2", "--lambda", "1/2", "--method", method)
        assert code == 0 and json.loads(out)["count_exact"] == "8"


def test_estimate_empty_graph():
    code, out = call("estimate", "--r", "3", "--m", "2", "--d", "0")
    assert code == 0 and json.loads(out)["log_naive"] == 0


def test_estimate_csv():
    code, out = call("estimate", "--r", "3", "--m", "3", "--d", "2", "--exact", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["exact_method"] == "dp"


def test_sweep_columns():
    code, out = call("sweep", "--r", "3", "--m", "2")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["d", "log_naive", "log_dense", "log_exact", "ratio"] and len(rows) == 6


def test_sample_is_deterministic():
    argv = ("sample", "--r", "3", "--m", "3", "--d", "2", "--count", "5", "--seed", "42")
    a, b = call(*argv), call(*argv, "--workers", "2")
    assert a == b and a[0] == 0
    assert len(a[1].splitlines()) == 5


def test_psimple():
    code, out = call("psimple", "--r", "3", "--m", "2", "--d", "2")
    assert code == 0 and json.loads(out)["exact"] == "8/9"
    argv = ("psimple", "--r", "3", "--m", "10", "--d", "2", "--samples", "20000", "--seed", "3")
    assert call(*argv, "--workers", "1") == call(*argv, "--workers", "2")
    assert json.loads(call(*argv)[1])["std_err"] > 0


def test_switch_census():
    code, out = call("switch-census", "--m", "2", "--d", "2")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["ell", "size", "fwd_total", "rev_total", "ratio", "predicted_ratio"]


def test_verify_all():
    code, out = call("verify", "--r", "3", "--m", "2", "--lambda", "1/2", "--suite", "all")
    obj = json.loads(out)
    assert code == 0 and obj["passed"] and all(c["passed"] is not False for c in obj["clauses"])


@pytest.mark.parametrize("argv,code", [
    (("count", "--r", "3", "--m", "2"), 1),
    (("frobnicate",), 1),
    (("count", "--m", "two", "--d", "1"), 1),
    (("count", "--r", "3", "--m", "2", "--d", "9"), 2),
    (("estimate", "--r", "3", "--m", "2", "--d", "1", "--formula", "bipartite"), 2),
    (("count", "--r", "3", "--m", "3", "--d", "2", "--method", "brute", "--budget", "10"), 3),
    (("switch-census", "--m", "8", "--d", "2"), 3),
])
def test_exit_codes(argv, code):
    assert call(*argv)[0] == code


def test_env_budget(monkeypatch):
    monkeypatch.setenv("HYPERCOUNT_BUDGET", "10")
    assert call("count", "--r", "3", "--m", "3", "--d", "2", "--method", "dft")[0] == 3


def test_repro_forced_failure(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema": 1, "criteria": {"5": {"tolerance": 0, "samples": 2000}}}))
    code, _ = call("repro", str(cfg))
    assert code == 4
    assert "criterion 5" in capsys.readouterr().err


def test_repro_empty(tmp_path, capsys):
    cfg = tmp_path / "empty.json"
    cfg.write_text("")
    assert call("repro", str(cfg)) == (0, "")
    assert "warning" in capsys.readouterr().err


def test_repro_subset(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema": 1, "criteria": {"3": {}, "9": {}}}))
    code, out = call("repro", str(cfg), "--format", "json")
    assert code == 0 and [r["id"] for r in json.loads(out)["results"]] == ["3", "9"]


def test_manifest(tmp_path):
    path = tmp_path / "m.json"
    code, out = call("count", "--r", "3", "--m", "2", "--d", "1", "--manifest", str(path))
    man = json.loads(path.read_text())
    assert man["subcommand"] == "count" and man["exit_code"] == 0
    import hashlib
    assert man["output_sha256"] == hashlib.sha256(out.encode()).hexdigest()
