import ast
import math
from pathlib import Path

import numpy as np
import pytest

import dualrisk.oracle as oracle
from dualrisk import BinaryLossLottery, DistortionFn
from dualrisk.errors import DomainError, MaxIterError, NoBracketError
from dualrisk.oracle import (
    BisectionConfig,
    GridEvaluationError,
    bisect,
    grid_maximize,
    indifference_wtp,
    max_bisection_steps,
    policy_objective_grid,
)
from dualrisk.policy import optimize_policy


def test_module_is_independent_of_closed_forms():
    tree = ast.parse(Path(oracle.__file__).read_text())
    imported = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            imported.add(node.module or "")
        elif isinstance(node, ast.Import):
            imported.update(alias.name for alias in node.names)
    for banned in ("wtp", "insurance", "policy"):
        assert not any(name.split(".")[-1] == banned for name in imported)


def test_config_validation():
    with pytest.raises(DomainError):
        BisectionConfig(abs_tol=0.0)
    with pytest.raises(DomainError):
        BisectionConfig(max_iter=0)


def test_indifference_examples(sq):
    s = BinaryLossLottery(50.0, 100.0, 0.2)
    assert indifference_wtp(DistortionFn.identity(), s, 0.0) == pytest.approx(20.0, abs=1e-8)
    assert indifference_wtp(sq, s, 0.1) == pytest.approx(17.0, abs=1e-8)
    assert indifference_wtp(sq, s, 0.2) == 0.0
    with pytest.raises(DomainError):
        indifference_wtp(sq, s, 0.3)


def test_bisect_errors_and_step_bound():
    with pytest.raises(NoBracketError):
        bisect(lambda v: v * v + 1.0, -1.0, 1.0, 1e-10, 100)
    with pytest.raises(MaxIterError):
        bisect(lambda v: v - 0.3, 0.0, 1.0, 1e-10, 5)
    calls = []

    def g(v):
        calls.append(v)
        return v - 1 / 3

    root = bisect(g, 0.0, 1.0, 1e-10, 200)
    assert abs(root - 1 / 3) <= 1e-10
    assert len(calls) - 2 <= max_bisection_steps(0.0, 1.0, 1e-10)


def test_grid_maximize_examples():
    assert grid_maximize(lambda x: 5.0, 1.0, 2.0, 11) == (1.0, 5.0)
    x, v = grid_maximize(lambda x: 3 * x, 0.0, 100.0, 10_001)
    assert (x, v) == (100.0, 300.0)
    x, v = grid_maximize(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, 11, vectorized=True)
    assert x == pytest.approx(0.3)
    with pytest.raises(DomainError):
        grid_maximize(lambda x: x, 1.0, 1.0, 10)
    with pytest.raises(DomainError):
        grid_maximize(lambda x: x, 0.0, 1.0, 1)


def test_grid_errors_carry_x():
    def boom(x):
        if x > 0.5:
            raise ValueError("bad")
        return x

    with pytest.raises(GridEvaluationError) as info:
        grid_maximize(boom, 0.0, 1.0, 11)
    assert info.value.x == pytest.approx(0.6)
    with pytest.raises(GridEvaluationError), np.errstate(all="ignore"):
        grid_maximize(lambda x: np.log(x - 0.5), 0.0, 1.0, 11, vectorized=True)


def test_determinism(sq):
    s = BinaryLossLottery(50.0, 100.0, 0.2)
    a = indifference_wtp(sq, s, 0.1)
    b = indifference_wtp(sq, s, 0.1)
    assert a == b and math.copysign(1, a) == math.copysign(1, b)
    fun = lambda x: np.sin(7 * x)  # noqa: E731
    assert grid_maximize(fun, 0.0, 3.0, 9999, True) == grid_maximize(fun, 0.0, 3.0, 9999, True)


def test_grid_matches_optimizer_on_worked_instance(worked_policy):
    sol = optimize_policy(worked_policy, 100_000)
    ps = worked_policy
    lo, hi = sol.admissible_interval
    _, value = policy_objective_grid(ps.distortion, ps.scenario, ps.loading, ps.cost, lo, hi, 100_000)
    assert abs(value - sol.objective) <= 1e-8
