"""Brute-force solvers used to check the closed forms.

Nothing here imports :mod:`dualrisk.wtp`, :mod:`dualrisk.insurance` or
:mod:`dualrisk.policy`. Every quantity is recovered from the DT functional
in :mod:`dualrisk.lottery` by bisection on an indifference condition or by
exhaustive grid search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distortion import DistortionFn
from .errors import DomainError, MaxIterError, NoBracketError
from .lottery import BinaryLossLottery, Lottery, dt_two_point, dt_value


@dataclass(frozen=True)
class BisectionConfig:
    abs_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not self.abs_tol > 0.0:
            raise DomainError("abs_tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


class GridEvaluationError(RuntimeError):
    def __init__(self, x: float, cause: Exception):
        super().__init__(f"objective failed at x={x!r}: {cause}")
        self.x = x


def bisect(g: Callable[[float], float], lo: float, hi: float, tol: float, max_iter: int) -> float:
    """Root of ``g`` on ``[lo, hi]``; stops once the bracket is narrower than ``tol``.

    Also stops when the midpoint can no longer split the bracket in floating
    point, so a tiny ``tol`` is safe.
    """
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo * g_hi > 0.0:
        raise NoBracketError(f"no sign change on [{lo!r}, {hi!r}]: g={g_lo!r}, {g_hi!r}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid <= lo or mid >= hi:
            return mid
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0.0) == (g_lo > 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    if hi - lo <= tol:
        return 0.5 * (lo + hi)
    raise MaxIterError(f"bisection did not reach width {tol!r} in {max_iter} steps")


def max_bisection_steps(lo: float, hi: float, tol: float) -> int:
    return math.ceil(math.log2((hi - lo) / tol))


def indifference_wtp(
    f: DistortionFn, s: BinaryLossLottery, p_to: float, cfg: BisectionConfig = BisectionConfig()
) -> float:
    """Sure payment ``v`` with ``W0 + X1 - v ~ W0 + X0``, ``X1`` having loss probability ``p_to``."""
    if not 0.0 <= p_to <= s.p:
        raise DomainError(f"p_to must lie in [0, {s.p!r}]")
    status_quo = dt_value(f, s.to_lottery())
    improved = s.with_p(p_to).to_lottery()

    def g(v: float) -> float:
        return dt_value(f, improved.shift(-v)) - status_quo

    if s.p == p_to:
        return 0.0
    return bisect(g, 0.0, s.L, cfg.abs_tol * s.L, cfg.max_iter)


def _full_cover_gain(f: DistortionFn, s: BinaryLossLottery, loading: float) -> float:
    prem = s.p * s.L * (1.0 + loading)
    insured = Lottery.degenerate(s.W0 + s.L - prem)
    return dt_value(f, insured) - dt_value(f, s.to_lottery())


def acceptance_boundary(
    f: DistortionFn, s: BinaryLossLottery, cfg: BisectionConfig = BisectionConfig()
) -> float:
    """Loading at which full cover stops raising the agent's DT value."""
    if not 0.0 < s.p:
        raise DomainError("acceptance boundary needs a positive loss probability")
    lo, hi = -1.0, 1.0
    while _full_cover_gain(f, s, hi) > 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NoBracketError("full cover stays attractive for every loading")
    return bisect(lambda lam: _full_cover_gain(f, s, lam), lo, hi, cfg.abs_tol, cfg.max_iter)


def coverage_values(f: DistortionFn, s: BinaryLossLottery, loading: float, q):
    """DT value of final wealth for indemnities ``q`` (array), from the ranked lottery."""
    q = np.asarray(q, dtype=float)
    prem = s.p * q * (1.0 + loading)
    bad = s.W0 - prem + q
    good = s.W0 - prem + s.L
    return dt_two_point(f, bad, good, 1.0 - s.p)


def grid_maximize(
    objective: Callable,
    lo: float,
    hi: float,
    n: int,
    vectorized: bool = False,
) -> tuple[float, float]:
    """Best of ``n`` equally spaced points on ``[lo, hi]``; ties go to the smallest x.

    A value of ``-inf`` marks a point as excluded; NaN or ``+inf`` is an error.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    if n < 2:
        raise DomainError("need at least two grid points")
    xs = np.linspace(lo, hi, n)
    if vectorized:
        values = np.asarray(objective(xs), dtype=float)
        bad = np.isnan(values) | np.isposinf(values)
        if bad.any():
            x = float(xs[np.argmax(bad)])
            raise GridEvaluationError(x, ValueError("non-finite objective value"))
    else:
        values = np.empty(n)
        for i, x in enumerate(xs):
            try:
                values[i] = objective(float(x))
            except Exception as exc:
                raise GridEvaluationError(float(x), exc) from exc
    if np.all(np.isneginf(values)):
        raise GridEvaluationError(float(lo), ValueError("every grid point is excluded"))
    i = int(np.argmax(values))
    return float(xs[i]), float(values[i])


# -- insurer problem ----------------------------------------------------------


def _agent_values(f, s, loading, unit_cost, x, alpha):
    x = np.asarray(x, dtype=float)
    q = s.p - x
    fee = np.asarray(unit_cost(x), dtype=float) * s.L
    prem = q * (1.0 + loading) * alpha * s.L
    bad = s.W0 - fee - prem + alpha * s.L
    good = s.W0 - fee - prem + s.L
    return dt_two_point(f, bad, good, 1.0 - q)


def participation_slack(f, s, loading, unit_cost, x, alpha):
    """Agent's DT with the contract minus DT without it; vectorised."""
    reservation = dt_value(f, s.to_lottery())
    return _agent_values(f, s, loading, unit_cost, x, alpha) - reservation


def saturating_alpha_secant(f, s, loading, unit_cost, x):
    """Coverage fraction that makes the participation slack vanish.

    The agent's DT is affine in the fraction on [0, 1] (the ranking of the
    two states never flips there), so two evaluations pin the root.
    """
    g0 = participation_slack(f, s, loading, unit_cost, x, 0.0)
    g1 = participation_slack(f, s, loading, unit_cost, x, 1.0)
    return g0 / (g0 - g1)


def indifference_alpha(
    f: DistortionFn,
    s: BinaryLossLottery,
    loading: float,
    unit_cost: Callable[[float], float],
    x: float,
    cfg: BisectionConfig = BisectionConfig(),
) -> float:
    """Bisection on the coverage fraction in [0, 1] that saturates participation."""

    def g(alpha: float) -> float:
        return float(participation_slack(f, s, loading, unit_cost, x, alpha))

    return bisect(g, 0.0, 1.0, cfg.abs_tol, cfg.max_iter)


def policy_objective_grid(
    f: DistortionFn,
    s: BinaryLossLottery,
    loading: float,
    unit_cost: Callable,
    lo: float,
    hi: float,
    n: int,
) -> tuple[float, float]:
    """Exhaustive search of the insurer's revenue with the fraction from :func:`saturating_alpha_secant`.

    Points whose saturating fraction falls outside [0, 1] are excluded, so
    the scan may start at 0 and run past the feasible region.
    """

    def revenue(x):
        alpha = saturating_alpha_secant(f, s, loading, unit_cost, x)
        value = (s.p - x) * (1.0 + loading) * alpha * s.L + np.asarray(unit_cost(x)) * s.L
        return np.where((alpha >= 0.0) & (alpha <= 1.0), value, -np.inf)

    return grid_maximize(revenue, lo, hi, n, vectorized=True)
