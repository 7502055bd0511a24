import numpy as np
import pytest

from dualrisk import BinaryLossLottery, CostSchedule, DistortionFn, PolicyScenario, optimize_policy
from dualrisk.errors import (
    DegenerateRegionError,
    DomainError,
    EmptyAdmissibleError,
    RegimeError,
    ScenarioError,
    SignError,
)
from dualrisk.oracle import (
    BisectionConfig,
    indifference_alpha,
    participation_slack,
    policy_objective_grid,
    saturating_alpha_secant,
)
from dualrisk.policy import (
    GRID_ENV,
    a_term,
    admissible_set,
    alpha_coverage,
    alpha_coverage_wtp_form,
    alpha_derivative,
    default_grid,
    insurer_objective,
    marginal_surplus,
    participation_gap,
    participation_residual,
    prop6_interval,
    surplus,
)
from dualrisk.wtp import WtpQuery, wtp_partial

from .conftest import random_policy

TIGHT = BisectionConfig(abs_tol=1e-14)


def make(f, p=0.5, lam=0.6, cost=None, L=100.0, W0=50.0):
    return PolicyScenario(BinaryLossLottery(W0, L, p), lam, cost or CostSchedule.linear(0.1), f)


def test_cost_schedule():
    c = CostSchedule.power(2.0, 3.0)
    assert c(0.0) == 0.0
    assert c(0.5) == pytest.approx(0.25)
    assert c.derivative(0.5) == pytest.approx(1.5)
    assert CostSchedule.from_dict(c.to_dict()) == c
    with pytest.raises(DomainError):
        CostSchedule.linear(0.0)
    with pytest.raises(DomainError):
        CostSchedule.power(1.0, 0.5)
    with pytest.raises(ScenarioError):
        CostSchedule.from_dict({"family": "quadratic", "k": 1.0})


def test_surplus_examples(worked_policy, sq):
    assert surplus(worked_policy, 0.0) == 0.0
    assert surplus(worked_policy, 0.2) == pytest.approx(22.0, abs=1e-12)
    assert surplus(worked_policy, 0.02) == pytest.approx(1.84, abs=1e-12)
    q = WtpQuery(worked_policy.scenario, 0.5, 0.3)
    assert surplus(worked_policy, 0.2) == pytest.approx(wtp_partial(sq, q) - 2.0, abs=1e-12)
    for bad in (-0.01, 0.5, 0.7):
        with pytest.raises(DomainError):
            surplus(worked_policy, bad)


def test_admissible_examples(worked_policy):
    (lo, hi), = admissible_set(worked_policy, 1000)
    assert lo <= 1e-3 and hi >= 0.3
    ident = make(DistortionFn.identity(), p=0.4, cost=CostSchedule.linear(2.0))
    with pytest.raises(EmptyAdmissibleError):
        admissible_set(ident, 1000)
    with pytest.raises(DomainError):
        admissible_set(worked_policy, 50)


def test_zero_surplus_boundary():
    ps = make(DistortionFn.identity(), p=0.4, cost=CostSchedule.linear(1.0))
    xs = np.linspace(0.0, 0.39, 100)
    assert np.max(np.abs(surplus(ps, xs))) <= 1e-12
    (lo, hi), = admissible_set(ps, 1000)
    assert lo < 1e-3 and hi > 0.399
    # zero surplus buys zero coverage; only the fee is collected
    value = insurer_objective(ps, 0.1)
    assert value.alpha == pytest.approx(0.0, abs=1e-15)
    assert value.objective == pytest.approx(0.1 * 100.0, abs=1e-12)


def test_alpha_example(worked_policy, sq):
    assert a_term(worked_policy, 0.02) == pytest.approx(1.8, abs=1e-12)
    a = alpha_coverage(worked_policy, 0.02)
    assert a == pytest.approx(1.84 / 3.84, abs=1e-12)
    assert a == pytest.approx(0.47917, abs=1e-5)
    assert alpha_coverage_wtp_form(worked_policy, 0.02) == pytest.approx(a, abs=1e-12)
    s, lam, c = worked_policy.scenario, worked_policy.loading, worked_policy.cost
    assert indifference_alpha(sq, s, lam, c, 0.02, TIGHT) == pytest.approx(a, abs=1e-12)
    assert saturating_alpha_secant(sq, s, lam, c, 0.02) == pytest.approx(a, abs=1e-12)
    assert alpha_coverage(worked_policy, 1e-12) == pytest.approx(0.0, abs=1e-9)


def test_alpha_sign_error():
    # loading far below lambda*: the denominator turns negative
    ps = make(DistortionFn.power(2.0), p=0.5, lam=-0.9)
    with pytest.raises(SignError):
        alpha_coverage(ps, 0.1)
    with pytest.raises(SignError):
        alpha_coverage_wtp_form(ps, 0.1)


def test_reduction_interval_examples(worked_policy):
    assert prop6_interval(worked_policy) == (0.0, pytest.approx(0.03125, abs=1e-15))
    sq = DistortionFn.power(2.0)
    at_star = make(sq, p=0.5, lam=make(sq).lambda_star)
    assert prop6_interval(at_star)[1] == pytest.approx(0.0, abs=1e-15)
    below = make(sq, p=0.5, lam=0.1)
    assert prop6_interval(below) == (0.0, 0.0)
    ident = make(DistortionFn.identity(), p=0.4, lam=0.5)
    assert prop6_interval(ident)[1] == pytest.approx(0.4 - 0.4 / 1.5, abs=1e-15)


def test_x_bar_positive_above_lambda_star(rng):
    for _ in range(300):
        ps = random_policy(rng, feasible=False)
        _, x_bar = prop6_interval(ps)
        assert x_bar > 0.0
        xs = np.linspace(0.0, x_bar, 202)[1:-1]
        assert np.all(a_term(ps, xs) > 0.0)


def test_objective_example(worked_policy, sq):
    value = insurer_objective(worked_policy, 0.02)
    a = 1.84 / 3.84
    assert value.objective == pytest.approx(0.48 * 1.6 * a * 100 + 0.2, abs=1e-10)
    assert value.objective == pytest.approx(37.0, abs=0.05)
    assert value.net_expected_profit == pytest.approx(0.6 * 0.48 * a * 100, abs=1e-10)
    s, lam, c = worked_policy.scenario, worked_policy.loading, worked_policy.cost
    a_oracle = indifference_alpha(sq, s, lam, c, 0.02, TIGHT)
    assert value.objective == pytest.approx(0.48 * 1.6 * a_oracle * 100 + 0.2, abs=1e-9)


def test_alpha_monotone_on_worked_instance(worked_policy):
    xs = np.linspace(0.0, 0.03125, 1002)[1:-1]
    alpha = alpha_coverage(worked_policy, xs)
    assert np.all(np.diff(alpha) > 0)
    assert np.all(alpha < 1)


def test_alpha_rises_with_marginal_surplus(rng):
    checked = 0
    while checked < 100:
        ps = random_policy(rng, feasible=False)
        if ps.cost.family != "linear":
            continue
        _, x_bar = prop6_interval(ps)
        xs = np.linspace(0.0, x_bar, 52)[1:-1]
        # the property concerns admissible reductions, where the surplus is non-negative
        rising = (marginal_surplus(ps, xs) > 0) & (surplus(ps, xs) >= 0)
        h = 1e-7 * x_bar
        fd = (alpha_coverage(ps, xs + h) - alpha_coverage(ps, xs - h)) / (2 * h)
        assert np.all(fd[rising] > 0)
        assert np.all(alpha_derivative(ps, xs)[rising] > 0)
        checked += 1


def test_coverage_is_partial(rng):
    for _ in range(100):
        ps = random_policy(rng, feasible=False)
        _, x_bar = prop6_interval(ps)
        xs = np.linspace(0.0, x_bar, 52)[1:-1]
        assert np.all(alpha_coverage(ps, xs) < 1.0)


def test_saturation_and_forms(rng):
    for _ in range(100):
        ps = random_policy(rng, feasible=False)
        _, x_bar = prop6_interval(ps)
        f, s, lam, c = ps.distortion, ps.scenario, ps.loading, ps.cost
        for x in rng.uniform(0.0, x_bar, 5):
            a = alpha_coverage(ps, x)
            assert abs(a - alpha_coverage_wtp_form(ps, x)) <= 1e-12
            assert abs(participation_residual(ps, x, a)) <= 1e-9 * ps.L
            assert abs(participation_slack(f, s, lam, c, x, a)) <= 1e-9 * ps.L
            assert abs(saturating_alpha_secant(f, s, lam, c, x) - a) <= 1e-9


def test_participation_algebra(rng):
    for _ in range(300):
        ps = random_policy(rng, feasible=False)
        f, s, lam, c = ps.distortion, ps.scenario, ps.loading, ps.cost
        x = rng.uniform(0.0, ps.p)
        a = rng.uniform(0.0, 1.0)
        direct = float(participation_slack(f, s, lam, c, x, a))
        tol = 1e-10 * max(1.0, s.W0 + s.L)
        assert participation_gap(ps, x, a) == pytest.approx(direct, abs=tol)
        assert participation_residual(ps, x, a) == pytest.approx(direct, abs=tol)


def test_optimize_worked(worked_policy, sq):
    sol = optimize_policy(worked_policy, 100_000)
    assert 0.0 < sol.x_star <= 0.03125
    assert sol.objective >= insurer_objective(worked_policy, 0.02).objective
    assert sol.x_bar == pytest.approx(0.03125, abs=1e-15)
    assert sol.saturated and abs(sol.pc_residual) <= 1e-9 * 100
    assert 0.0 <= sol.alpha_star < 1.0
    s, lam, c = worked_policy.scenario, worked_policy.loading, worked_policy.cost
    lo, hi = sol.admissible_interval
    _, best = policy_objective_grid(sq, s, lam, c, lo, hi, 100_000)
    assert sol.objective >= best - 1e-8
    if sol.interior:
        assert abs(sol.stationarity) < 1e-6 * 100
    record = sol.to_dict()
    assert record["x_star"] == sol.x_star and len(record["admissible_interval"]) == 2


def test_optimize_errors(sq):
    with pytest.raises(RegimeError):
        optimize_policy(make(sq, lam=0.3), 1000)
    with pytest.raises(EmptyAdmissibleError):
        optimize_policy(make(DistortionFn.identity(), p=0.4, cost=CostSchedule.linear(2.0)), 1000)
    for k in (1.5, 3.0, 10.0):
        with pytest.raises(EmptyAdmissibleError):
            optimize_policy(make(DistortionFn.identity(), p=0.4, cost=CostSchedule.linear(k)), 1000)


def test_degenerate_region():
    # convex distortion with a steep linear cost: admissible only far from 0, past x_bar
    f = DistortionFn.power(4.0)
    ps = make(f, p=0.5, lam=1.0, cost=CostSchedule.linear(0.6))
    (lo, _), = admissible_set(ps, 2000)
    assert lo > prop6_interval(ps)[1]
    with pytest.raises(DegenerateRegionError):
        optimize_policy(ps, 2000)


def test_optimize_random_against_grid(rng):
    for _ in range(20):
        ps = random_policy(rng)
        sol = optimize_policy(ps, 20_000)
        f, s, lam, c = ps.distortion, ps.scenario, ps.loading, ps.cost
        lo, hi = sol.admissible_interval
        _, best = policy_objective_grid(f, s, lam, c, lo, hi, 200_000)
        assert sol.objective >= best - 1e-8 * ps.L
        assert sol.saturated
        assert 0.0 <= sol.alpha_star < 1.0
        if sol.interior:
            assert abs(sol.stationarity) < 1e-6 * ps.L


def test_grid_env(monkeypatch):
    monkeypatch.delenv(GRID_ENV, raising=False)
    assert default_grid() == 100_000
    monkeypatch.setenv(GRID_ENV, "5000")
    assert default_grid() == 5000
    monkeypatch.setenv(GRID_ENV, "lots")
    with pytest.raises(DomainError):
        default_grid()
