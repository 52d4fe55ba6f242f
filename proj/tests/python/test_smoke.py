import math
import os
from pathlib import Path

import pytest

import pgplan

DATA = Path(os.environ.get("PGPLAN_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def read(rel):
    return (DATA / rel).read_text()


def test_softmax_and_entropy():
    p = pgplan.boltzmann([1.5, 0.5])
    assert p[0] == pytest.approx(1 / (1 + math.exp(-1)), abs=1e-12)
    assert pgplan.entropy([0.25] * 4) == pytest.approx(math.log(4))
    assert pgplan.kl_divergence(p, p) == pytest.approx(0.0, abs=1e-12)
    assert pgplan.score_method(0, 0, 1) == pytest.approx(3.0)


def test_plan_none_and_active():
    dom, prob = read("domains/blocksworld.dom"), read("problems/clear-b.prob")
    base = pgplan.plan(dom, prob, "none")
    assert base["outcome"] == "solved"
    assert base["valid"]
    assert base["stats"]["queries"] == 0

    r = pgplan.plan(dom, prob, "active", oracle=read("oracles/blocksworld.oracle"), seed=1)
    assert r["outcome"] == "solved"
    assert r["valid"]
    assert r["stats"]["queries"] >= 1
    assert len(r["plan"]) <= len(base["plan"])
    assert "(pref" in r["elicited"]


def test_errors_are_translated():
    with pytest.raises(pgplan.PlannerError):
        pgplan.check_domain("(defdomain bad ((:operator (pick ?x) ((holding ?x)) () ())))")
    with pytest.raises(pgplan.PlannerError):
        pgplan.plan(read("domains/blocksworld.dom"), read("problems/clear-b.prob"), "greedy")


def test_suite(tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(
        '{"strategies": ["none", "active"], "time_limit_s": 10, "domains": [{"name": "bw",'
        f' "domain": "{DATA}/domains/blocksworld.dom", "oracle": "{DATA}/oracles/blocksworld.oracle",'
        f' "problems": ["{DATA}/problems/bw-01.prob", "{DATA}/problems/bw-02.prob"]}}]}}'
    )
    report = pgplan.run_suite(cfg, with_timing=False)
    assert len(report["cells"]) == 4
    assert all("wall_ms" not in c for c in report["cells"])
    assert {a["strategy"] for a in report["aggregates"]} == {"none", "active"}
