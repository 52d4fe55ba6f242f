"""Python bindings for the pgplan HTN planner."""

import json

from ._core import (
    PlannerError,
    boltzmann,
    check_domain,
    entropy,
    kl_divergence,
    score_method,
)

__all__ = [
    "PlannerError",
    "boltzmann",
    "check_domain",
    "entropy",
    "kl_divergence",
    "plan",
    "run_suite",
    "score_method",
]


def plan(domain, problem, strategy="none", oracle="", prefs="", **params):
    """Run one search. `domain` and `problem` are planner-format texts.

    Returns a dict with outcome, plan, stats, valid and the elicited
    preference log.
    """
    from ._core import plan_json

    return json.loads(plan_json(domain, problem, strategy, oracle, prefs, json.dumps(params)))


def run_suite(config_path, with_timing=True):
    """Run a benchmark suite config and return the report as a dict."""
    from ._core import suite_json

    return json.loads(suite_json(str(config_path), with_timing))
