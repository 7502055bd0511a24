import numpy as np
import pytest

from dualrisk import BinaryLossLottery, CostSchedule, DistortionFn, Lottery, PolicyScenario, lambda_star
from dualrisk.errors import DegenerateRegionError, EmptyAdmissibleError
from dualrisk.policy import admissible_set, prop6_interval


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def sq():
    return DistortionFn.power(2.0)


@pytest.fixture
def worked_policy():
    """Power(2), p=0.5, loading 0.6, linear cost k=0.1, L=100."""
    s = BinaryLossLottery(50.0, 100.0, 0.5)
    return PolicyScenario(s, 0.6, CostSchedule.linear(0.1), DistortionFn.power(2.0))


def random_distortion(rng, family=None):
    family = family or rng.choice(["identity", "power", "prelec", "convex_mix"])
    if family == "identity":
        return DistortionFn.identity()
    if family == "power":
        return DistortionFn.power(rng.uniform(0.2, 5.0))
    if family == "prelec":
        return DistortionFn.prelec(rng.uniform(0.3, 1.5), rng.uniform(0.5, 2.0))
    return DistortionFn.convex_mix(rng.uniform(0.0, 1.0), rng.uniform(0.2, 5.0))


def random_lottery(rng, max_atoms=6, scale=100.0):
    n = int(rng.integers(1, max_atoms + 1))
    outcomes = rng.uniform(-scale, scale, n)
    probs = rng.dirichlet(np.ones(n))
    return Lottery.from_pairs(zip(outcomes, probs))


def random_scenario(rng, p_lo=0.01, p_hi=0.99):
    return BinaryLossLottery(rng.uniform(0.0, 1e3), rng.uniform(1.0, 1e4), rng.uniform(p_lo, p_hi))


def random_policy(rng, feasible=True, grid_n=2000):
    """Convex power distortion, loading above lambda*, a cost the agent may afford."""
    while True:
        f = DistortionFn.power(rng.uniform(1.05, 4.0))
        s = random_scenario(rng, 0.05, 0.95)
        lam = lambda_star(f, s) * (1.0 + rng.uniform(0.01, 1.0)) + rng.uniform(0.0, 0.3)
        if rng.random() < 0.5:
            cost = CostSchedule.linear(rng.uniform(0.01, 1.0))
        else:
            cost = CostSchedule.power(rng.uniform(0.1, 20.0), rng.uniform(1.0, 3.0))
        ps = PolicyScenario(s, lam, cost, f)
        if not feasible:
            return ps
        try:
            intervals = admissible_set(ps, grid_n)
        except EmptyAdmissibleError:
            continue
        _, x_bar = prop6_interval(ps)
        if any(min(hi, x_bar) - lo > 1e-6 for lo, hi in intervals):
            return ps


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(line)
