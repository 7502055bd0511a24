"""The insurer's joint risk-reduction and coverage policy.

The insurer cuts the loss probability from ``p`` to ``p - x`` for a fee
``c(x) L`` and sells a fraction ``alpha`` of full cover at loading ``lam``.
Extracting the whole surplus saturates the agent's participation
constraint, which fixes

    alpha(x) = [f(1 - p + x) - f(1 - p) - c(x)] / [(p - x)(1 + lam) + f(1 - p + x) - 1]

and leaves a one-dimensional search over ``x`` for the revenue

    (p - x)(1 + lam) alpha(x) L + c(x) L.

All amounts below are in currency units unless a name ends in ``_unit``
(per unit of ``L``).
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .distortion import DistortionFn
from .errors import (
    DegenerateRegionError,
    DomainError,
    EmptyAdmissibleError,
    RegimeError,
    ScenarioError,
    SignError,
)
from .insurance import lambda_star
from .lottery import BinaryLossLottery

GRID_ENV = "DUALRISK_GRID_DEFAULT"
GRID_DEFAULT = 100_000
X_TOL = 1e-10
SURPLUS_TOL = 1e-12
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def default_grid() -> int:
    raw = os.environ.get(GRID_ENV)
    if raw is None:
        return GRID_DEFAULT
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"{GRID_ENV} must be an integer, got {raw!r}") from None
    if n < 100:
        raise DomainError(f"{GRID_ENV} must be at least 100, got {n}")
    return n


@dataclass(frozen=True)
class CostSchedule:
    """Unit cost ``c(x) = k * x**m`` of cutting the loss probability by ``x``.

    ``linear`` fixes ``m = 1``. The total cost charged is ``c(x) * L``.
    """

    family: str
    k: float
    m: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in ("linear", "power_cost"):
            raise DomainError(f"unknown cost family {self.family!r}")
        if not (math.isfinite(self.k) and self.k > 0.0):
            raise DomainError(f"cost k must be positive, got {self.k!r}")
        if self.family == "linear" and self.m != 1.0:
            raise DomainError("linear cost has m = 1")
        if not (math.isfinite(self.m) and self.m >= 1.0):
            raise DomainError(f"cost exponent m must be >= 1, got {self.m!r}")

    @classmethod
    def linear(cls, k: float) -> CostSchedule:
        return cls("linear", float(k))

    @classmethod
    def power(cls, k: float, m: float) -> CostSchedule:
        return cls("power_cost", float(k), float(m))

    @classmethod
    def from_dict(cls, spec: dict) -> CostSchedule:
        spec = dict(spec)
        family = str(spec.pop("family", "")).lower().replace("-", "_")
        if family in ("power", "powercost"):
            family = "power_cost"
        allowed = {"linear": {"k"}, "power_cost": {"k", "m"}}
        if family not in allowed:
            raise ScenarioError(f"unknown cost family {family!r}")
        unknown = set(spec) - allowed[family]
        if unknown:
            raise ScenarioError(f"unknown field(s) for {family} cost: {sorted(unknown)}")
        missing = allowed[family] - set(spec)
        if missing:
            raise ScenarioError(f"missing field(s) for {family} cost: {sorted(missing)}")
        return cls(family, **{key: float(v) for key, v in spec.items()})

    def to_dict(self) -> dict:
        if self.family == "linear":
            return {"family": "linear", "k": self.k}
        return {"family": "power_cost", "k": self.k, "m": self.m}

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.k * x**self.m
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.m == 1.0:
            out = np.full_like(x, self.k)
        else:
            out = self.k * self.m * x ** (self.m - 1.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PolicyScenario:
    """Problem instance for the insurer.

    The standing assumption ``loading > lambda*`` is not enforced here so
    that boundary instances can be inspected; :func:`optimize_policy`
    checks it via :meth:`require_regime`.
    """

    scenario: BinaryLossLottery
    loading: float
    cost: CostSchedule
    distortion: DistortionFn

    @property
    def p(self) -> float:
        return self.scenario.p

    @property
    def L(self) -> float:
        return self.scenario.L

    @property
    def lambda_star(self) -> float:
        return lambda_star(self.distortion, self.scenario)

    def require_regime(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise RegimeError(f"loss probability must lie in (0, 1), got {self.p!r}")
        lam_star = self.lambda_star
        if not self.loading > lam_star:
            raise RegimeError(
                f"loading {self.loading!r} must exceed lambda* = {lam_star!r}; "
                "below it the agent buys full cover without any reduction"
            )


class PolicyValue(NamedTuple):
    objective: float
    alpha: float
    net_expected_profit: float


@dataclass(frozen=True)
class PolicySolution:
    x_star: float
    alpha_star: float
    objective: float
    surplus_at_x: float
    pc_residual: float
    net_expected_profit: float
    admissible_interval: tuple[float, float]
    x_bar: float
    lambda_star: float
    interior: bool
    stationarity: float | None
    saturated: bool

    def to_dict(self) -> dict:
        out = asdict(self)
        out["admissible_interval"] = list(self.admissible_interval)
        return out


# -- pointwise quantities ------------------------------------------------------


def _check_x(ps: PolicyScenario, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0) or np.any(arr >= ps.p):
        raise DomainError(f"reduction x must lie in [0, p={ps.p!r}), got {x!r}")
    return arr


def _scalar(value, like):
    return float(value) if np.ndim(like) == 0 else value


def surplus_unit(ps: PolicyScenario, x):
    f, p = ps.distortion, ps.p
    arr = _check_x(ps, x)
    return _scalar(np.asarray(f.increment(1.0 - p, arr)) - np.asarray(ps.cost(arr)), x)


def surplus(ps: PolicyScenario, x):
    """WTP for the reduction minus its total cost."""
    return _scalar(np.asarray(surplus_unit(ps, x)) * ps.L, x)


def marginal_surplus(ps: PolicyScenario, x):
    arr = _check_x(ps, x)
    f = ps.distortion
    out = (np.asarray(f.derivative(1.0 - ps.p + arr)) - np.asarray(ps.cost.derivative(arr))) * ps.L
    return _scalar(out, x)


def a_term(ps: PolicyScenario, x):
    """``A(x) = [(p - x)(1 + lam) + f(1 - p) - 1] L``."""
    arr = _check_x(ps, x)
    f, p = ps.distortion, ps.p
    return _scalar(((p - arr) * (1.0 + ps.loading) + f(1.0 - p) - 1.0) * ps.L, x)


def _alpha_parts(ps: PolicyScenario, arr: np.ndarray):
    f, p, lam = ps.distortion, ps.p, ps.loading
    gain = np.asarray(f.increment(1.0 - p, arr))
    num = gain - np.asarray(ps.cost(arr))
    den = (p - arr) * (1.0 + lam) + f(1.0 - p) - 1.0 + gain
    return num, den


def alpha_coverage(ps: PolicyScenario, x):
    """Coverage fraction that saturates the participation constraint.

    Raises :class:`SignError` where the denominator is not positive.
    """
    arr = _check_x(ps, x)
    num, den = _alpha_parts(ps, arr)
    if np.any(den <= 0.0):
        raise SignError(f"coverage denominator is not positive at x={x!r}")
    return _scalar(num / den, x)


def alpha_coverage_wtp_form(ps: PolicyScenario, x):
    """Same fraction written as ``(WTP - TC) / (WTP + A)``."""
    arr = _check_x(ps, x)
    f, p, L = ps.distortion, ps.p, ps.L
    wtp = (np.asarray(f(1.0 - p + arr)) - f(1.0 - p)) * L
    tc = np.asarray(ps.cost(arr)) * L
    den = wtp + np.asarray(a_term(ps, arr))
    if np.any(den <= 0.0):
        raise SignError(f"coverage denominator is not positive at x={x!r}")
    return _scalar((wtp - tc) / den, x)


def alpha_derivative(ps: PolicyScenario, x):
    arr = _check_x(ps, x)
    f = ps.distortion
    num, den = _alpha_parts(ps, arr)
    fp = np.asarray(f.derivative(1.0 - ps.p + arr))
    dnum = fp - np.asarray(ps.cost.derivative(arr))
    dden = fp - (1.0 + ps.loading)
    return _scalar((dnum * den - num * dden) / den**2, x)


def prop6_interval(ps: PolicyScenario) -> tuple[float, float]:
    """``(0, x_bar)`` on which ``A(x) > 0``; empty ``(0, 0)`` when ``loading <= lambda*``."""
    f, p = ps.distortion, ps.p
    x_bar = p - (1.0 - f(1.0 - p)) / (1.0 + ps.loading)
    return (0.0, max(x_bar, 0.0))


def insurer_objective(ps: PolicyScenario, x) -> PolicyValue:
    """Premium income plus reduction fee, and the loaded part of the premium."""
    alpha = np.asarray(alpha_coverage(ps, x))
    arr = np.asarray(x, dtype=float)
    q = ps.p - arr
    premium = q * (1.0 + ps.loading) * alpha * ps.L
    objective = premium + np.asarray(ps.cost(arr)) * ps.L
    profit = ps.loading * q * alpha * ps.L
    return PolicyValue(_scalar(objective, x), _scalar(alpha, x), _scalar(profit, x))


def objective_derivative(ps: PolicyScenario, x):
    arr = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha_coverage(ps, x))
    d_alpha = np.asarray(alpha_derivative(ps, x))
    lam = ps.loading
    out = (-(1.0 + lam) * alpha + (ps.p - arr) * (1.0 + lam) * d_alpha
           + np.asarray(ps.cost.derivative(arr))) * ps.L
    return _scalar(out, x)


def participation_residual(ps: PolicyScenario, x: float, alpha: float) -> float:
    """Agent's DT under the contract minus DT without it (zero when saturated)."""
    f, p, lam, L, W0 = ps.distortion, ps.p, ps.loading, ps.L, ps.scenario.W0
    q = p - x
    with_contract = (
        W0 - ps.cost(x) * L + alpha * L - q * (1.0 + lam) * alpha * L + f(1.0 - q) * (1.0 - alpha) * L
    )
    return with_contract - (W0 + f(1.0 - p) * L)


def participation_gap(ps: PolicyScenario, x: float, alpha: float) -> float:
    """Rearranged constraint ``WTP - TC - alpha L [(p - x)(1 + lam) - 1 + f(1 - p + x)]``."""
    f, p, lam, L = ps.distortion, ps.p, ps.loading, ps.L
    q = p - x
    wtp = (f(1.0 - q) - f(1.0 - p)) * L
    return wtp - ps.cost(x) * L - alpha * L * (q * (1.0 + lam) - 1.0 + f(1.0 - q))


# -- admissible set -----------------------------------------------------------


def _refine(g, inside: float, outside: float, tol: float) -> float:
    """Bisect toward the sign change and return the last point with ``g >= 0``."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if g(mid) >= 0.0:
            inside = mid
        else:
            outside = mid
    return inside


def admissible_set(ps: PolicyScenario, grid_n: int | None = None) -> list[tuple[float, float]]:
    """Maximal subintervals of ``(0, p)`` where the reduction fee does not exceed the WTP.

    Returned as closed ``(lo, hi)`` pairs; an endpoint equal to 0 or ``p``
    is a limit of the scan, not a member.

    Raises
    ------
    EmptyAdmissibleError
        When no scanned point is admissible.
    """
    n = default_grid() if grid_n is None else int(grid_n)
    if n < 100:
        raise DomainError(f"grid_n must be at least 100, got {n}")
    p = ps.p
    if not p > 0.0:
        raise EmptyAdmissibleError("no reduction possible when p = 0")
    xs = p * np.arange(1, n + 1) / (n + 1)
    ok = np.asarray(surplus_unit(ps, xs)) >= -SURPLUS_TOL
    if not ok.any():
        raise EmptyAdmissibleError(
            f"reduction cost exceeds the willingness to pay at all {n} scanned points"
        )

    def g(x: float) -> float:
        return surplus_unit(ps, x)

    intervals = []
    edges = np.flatnonzero(np.diff(ok.astype(np.int8)))
    starts = [0] if ok[0] else []
    ends = []
    for e in edges:
        if ok[e]:
            ends.append(e)
        else:
            starts.append(e + 1)
    if ok[-1]:
        ends.append(n - 1)
    for i, j in zip(starts, ends):
        lo = 0.0 if i == 0 else _refine(g, float(xs[i]), float(xs[i - 1]), X_TOL * 1e-2)
        hi = p if j == n - 1 else _refine(g, float(xs[j]), float(xs[j + 1]), X_TOL * 1e-2)
        intervals.append((lo, hi))
    return intervals


# -- optimisation -------------------------------------------------------------


def golden_section_max(fun, a: float, b: float, tol: float = X_TOL, max_iter: int = 500):
    """Maximise a unimodal ``fun`` on ``[a, b]``; returns ``(x, fun(x))``."""
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = fun(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _central_difference(fun, x: float, h: float) -> float:
    """Central difference with one Richardson step (error of order h**4)."""

    def d(step):
        return (fun(x + step) - fun(x - step)) / (2.0 * step)

    return (4.0 * d(0.5 * h) - d(h)) / 3.0


def _root_of_slope(ps, a: float, b: float) -> float | None:
    """Stationary point of the objective in ``[a, b]`` if the slope changes sign there."""
    da, db = objective_derivative(ps, a), objective_derivative(ps, b)
    if not (da > 0.0 > db):
        return None
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if objective_derivative(ps, mid) > 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _best_on(ps: PolicyScenario, lo: float, hi: float, n: int) -> tuple[float, float]:
    def obj(x):
        return insurer_objective(ps, x).objective

    xs = np.linspace(lo, hi, max(n, 3))
    values = np.asarray(obj(xs))
    i = int(np.argmax(values))
    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, len(xs) - 1)])
    candidates = [(float(xs[i]), float(values[i])), (lo, obj(lo)), (hi, obj(hi))]
    candidates.append(golden_section_max(obj, a, b))
    # highest objective, ties to the smallest x
    best = max(candidates, key=lambda c: (c[1], -c[0]))
    root = _root_of_slope(ps, a, b)
    if root is not None:
        # near a smooth maximum the objective is flat to roundoff; the slope root is sharper
        root_value = obj(root)
        if root_value >= best[1] - 1e-9 * max(1.0, abs(best[1])):
            return root, root_value
    return best


def optimize_policy(ps: PolicyScenario, grid_n: int | None = None) -> PolicySolution:
    """Maximise the insurer's revenue over admissible reductions with a valid fraction.

    The feasible set is the admissible set intersected with ``(0, x_bar]``,
    where the coverage fraction lies in [0, 1). A dense scan picks the best
    bracket, which is then refined by golden-section search and, when the
    slope changes sign inside it, by bisection on the analytic slope.

    Raises
    ------
    RegimeError
        If ``loading <= lambda*``.
    EmptyAdmissibleError
        If no reduction is worth its cost.
    DegenerateRegionError
        If the admissible set does not meet ``(0, x_bar]`` in an interval.
    """
    ps.require_regime()
    n = default_grid() if grid_n is None else int(grid_n)
    intervals = admissible_set(ps, n)
    _, x_bar = prop6_interval(ps)
    feasible = [(lo, min(hi, x_bar)) for lo, hi in intervals if min(hi, x_bar) - lo > X_TOL]
    if not feasible:
        raise DegenerateRegionError(
            f"admissible set {intervals} does not meet (0, x_bar={x_bar!r}] in an interval"
        )
    total = sum(hi - lo for lo, hi in feasible)
    best = None
    for lo, hi in feasible:
        share = max(int(n * (hi - lo) / total), 100)
        x, value = _best_on(ps, lo, hi, share)
        if best is None or value > best[1]:
            best = (x, value, (lo, hi))
    x_star, _, (lo, hi) = best
    value = insurer_objective(ps, x_star)
    interior = (x_star - lo) > 1e-9 and (hi - x_star) > 1e-9
    stationarity = None
    if interior:
        # step shrinks with the distance to the ends; cost curvature blows up near 0
        h = min(1e-6, 1e-2 * min(x_star - lo, hi - x_star))
        stationarity = _central_difference(lambda x: insurer_objective(ps, x).objective, x_star, h)
    residual = participation_residual(ps, x_star, value.alpha)
    return PolicySolution(
        x_star=x_star,
        alpha_star=value.alpha,
        objective=value.objective,
        surplus_at_x=surplus(ps, x_star),
        pc_residual=residual,
        net_expected_profit=value.net_expected_profit,
        admissible_interval=(lo, hi),
        x_bar=x_bar,
        lambda_star=ps.lambda_star,
        interior=interior,
        stationarity=stationarity,
        saturated=abs(residual) <= 1e-9 * ps.L,
    )
