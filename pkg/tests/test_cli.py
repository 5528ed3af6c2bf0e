import csv
import io
import json
import subprocess
import sys

import pytest

from truncprob.cli import BENCH_COLUMNS, dumps, main

PROB_KEYS = {"p_lower", "p_upper", "eta", "method", "per_dim", "terms_summed", "terms_full"}
DIM_KEYS = {"u", "v", "k_lo", "k_hi", "lower_certificate", "upper_certificate"}


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def test_prob_theorem_demo():
    code, text = run(["prob", "--dist", "binomial:n=100,p=0.5", "--range", "0:100",
                      "--eta", "0.01", "--method", "massart"])
    assert code == 0
    doc = json.loads(text)
    assert PROB_KEYS <= doc.keys()
    assert DIM_KEYS <= doc["per_dim"][0].keys()
    assert (doc["per_dim"][0]["k_lo"], doc["per_dim"][0]["k_hi"]) == (34, 66)


def test_prob_small():
    code, text = run(["prob", "--dist", "binomial:n=2,p=0.5", "--range", "1:1", "--eta", "0.9"])
    doc = json.loads(text)
    assert code == 0 and doc["p_lower"] <= 0.5 <= doc["p_upper"]


def test_bad_p(capsys):
    code, _ = run(["prob", "--dist", "binomial:n=2,p=1.2", "--range", "1:1", "--eta", "0.9"])
    err = capsys.readouterr().err
    assert code == 2
    assert "p" in err and err.count("\n") == 1


def test_missing_field(capsys):
    code, _ = run(["prob", "--dist", "poisson_sum:n=2", "--range", "0:inf", "--eta", "0.1"])
    assert code == 2 and "lambda" in capsys.readouterr().err


def test_argparse_error_is_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["prob", "--method", "simpson"])
    assert exc.value.code == 2


def test_truncate_demo():
    code, text = run(["truncate", "--dist", "binomial:n=100,p=0.5", "--range", "0:100",
                      "--eta", "0.01", "--method", "massart"])
    doc = json.loads(text)
    assert code == 0 and "p_lower" not in doc
    assert (doc["per_dim"][0]["k_lo"], doc["per_dim"][0]["k_hi"]) == (34, 66)


def test_truncate_large():
    code, text = run(["truncate", "--dist", "binomial:n=1000000,p=0.5", "--range", "0:1000000",
                      "--eta", "1e-9", "--method", "massart"])
    doc = json.loads(text)
    d = doc["per_dim"][0]
    assert d["k_hi"] - d["k_lo"] + 1 == doc["terms_summed"] == 6545


def test_truncate_poisson_massart(capsys):
    code, _ = run(["truncate", "--dist", "poisson_sum:n=5,lambda=2", "--range", "0:inf",
                   "--eta", "0.01", "--method", "massart"])
    assert code == 2 and "unsupported method" in capsys.readouterr().err


def test_verify_contained(tmp_path):
    spec = tmp_path / "q.json"
    spec.write_text(json.dumps({
        "dimensions": [
            {"family": "binomial", "n": 80, "p": 0.3, "a": 10, "b": 60},
            {"family": "poisson_sum", "n": 4, "lambda": 1.5, "a": 1, "b": "inf"},
        ],
        "eta": 1e-4,
        "method": "chernoff",
    }))
    code, text = run(["verify", "--spec", str(spec)])
    doc = json.loads(text)
    assert code == 0 and doc["contained"] is True
    assert PROB_KEYS | {"p_oracle", "contained", "slack"} <= doc.keys()


def test_verify_point_at_mode():
    code, text = run(["verify", "--dist", "binomial:n=50,p=0.5", "--range", "25:25", "--eta", "0.01"])
    assert code == 0 and json.loads(text)["slack"] == 0.0


def test_verify_resource_cap(monkeypatch, capsys):
    monkeypatch.setenv("TRUNCPROB_TERM_CAP", "100")
    code, _ = run(["verify", "--dist", "binomial:n=1000,p=0.5", "--range", "0:1000", "--eta", "0.01"])
    assert code == 3
    assert "cap" in capsys.readouterr().err


def test_float_format_round_trips():
    for x in (0.1, 1 / 3, 2.0**-1074, 0.9991262801630878, 1e300, 5.0):
        text = dumps({"x": x})
        assert json.loads(text)["x"] == x
    assert dumps({"x": 1 / 3}) == '{"x": 0.33333333333333331}'
    assert dumps({"k": None, "b": True}) == '{"k": null, "b": true}'


def test_empty_interval_keys_present():
    code, text = run(["prob", "--dist", "binomial:n=10,p=0.5", "--range", "11:20", "--eta", "0.1"])
    d = json.loads(text)["per_dim"][0]
    assert DIM_KEYS <= d.keys() and d["k_lo"] is None


def test_bench(tmp_path):
    spec = tmp_path / "b.ndjson"
    spec.write_text(
        json.dumps({"id": "small", "dimensions": [{"family": "binomial", "n": 10, "p": 0.5, "a": 0, "b": 10}],
                    "eta": 0.01, "method": "massart"}) + "\n\n"
        + json.dumps({"dimensions": [{"family": "poisson_sum", "n": 2, "lambda": 3, "a": 0, "b": "inf"}],
                      "eta": 1e-6}) + "\n")
    code, text = run(["bench", str(spec), "--repeat", "2"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0].keys()) == BENCH_COLUMNS
    assert [r["query_id"] for r in rows] == ["small", "3"]
    assert all(float(r["speedup"]) > 0 for r in rows)


def test_bench_missing_file(tmp_path):
    assert run(["bench", str(tmp_path / "nope.ndjson")])[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "truncprob", "prob", "--dist", "binomial:n=4,p=0.5", "--range", "0:4",
         "--eta", "0.1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["p_upper"] <= 1.0
