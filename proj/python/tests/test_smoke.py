import json
import math
import os
from pathlib import Path

import pytest

halfcell = pytest.importorskip("halfcell")

EXAMPLES = Path(os.environ.get("HALFCELL_EXAMPLES", Path(__file__).parents[2] / "examples"))


def test_eval_expr():
    assert halfcell.eval_expr("2 + 3*4", {}) == 14
    assert halfcell.eval_expr("sin(pi/2)", {}) == pytest.approx(1.0)
    assert halfcell.eval_expr("2*y1", {"y1": 3.0}) == pytest.approx(6.0)


def test_run_lambda(tmp_path):
    cfg = (EXAMPLES / "constant_f.cfg").read_text()
    r = halfcell.run("lambda", cfg, str(tmp_path), [])
    assert r["exit_code"] == 0
    assert r["result"]["lambda"] == pytest.approx(-2.0, abs=1e-6)
    on_disk = json.loads((tmp_path / "lambda.json").read_text())
    assert on_disk["lambda"] == r["result"]["lambda"]


def test_run_file_with_overrides(tmp_path):
    r = halfcell.run_file(
        "mu",
        str(EXAMPLES / "drift_toward_1d.cfg"),
        str(tmp_path),
        ["numerics.heights=4, 8"],
    )
    assert r["exit_code"] == 0
    assert r["result"]["uniqueness_flag"] == "unique-consistent"
    assert r["result"]["mu"] == pytest.approx(-0.5, abs=1e-4)


def test_counterexample_flags_nonuniqueness(tmp_path):
    r = halfcell.run_file("mu", str(EXAMPLES / "counterexample_1d.cfg"), str(tmp_path), [])
    assert r["exit_code"] == 1
    assert r["result"]["uniqueness_flag"] == "suspect-nonunique"


def test_bad_config_raises():
    with pytest.raises(halfcell.ConfigError):
        halfcell.run("lambda", "[problem]\ndim = 7\n", "/tmp", [])


def test_mc_ktime(tmp_path):
    cfg = """
[problem]
dim = 1
operator = linear
A = "1"
f = "0"
gamma1 = "-1"
g = "0"

[numerics]
mc_mode = ktime
dt = 0.005
T = 1
paths = 4000
seed = 5
threads = 1
height = 10
x0 = 0
"""
    r = halfcell.run("mc", cfg, str(tmp_path), [])
    assert r["exit_code"] == 0
    oracle = 2 * math.sqrt(1 / math.pi)
    assert abs(r["result"]["mean_k"] - oracle) < 4 * r["result"]["se_k"]
