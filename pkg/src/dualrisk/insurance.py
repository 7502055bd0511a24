"""Insurance demand for the binary loss lottery.

Buying indemnity ``Q`` at premium ``p0 Q (1 + loading)`` changes the DT value
of final wealth by ``a(loading) Q`` with

    a(loading) = 1 - p0 (1 + loading) - f(1 - p0)

Because the gain is linear in ``Q`` the optimum always sits at a corner:
full cover when ``a > 0``, nothing when ``a < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distortion import DistortionFn
from .errors import DomainError
from .lottery import BinaryLossLottery

INDIFFERENCE_TOL = 1e-12


@dataclass(frozen=True)
class InsuranceQuote:
    scenario: BinaryLossLottery
    loading: float
    indemnity: float

    def __post_init__(self) -> None:
        if self.loading < -1.0:
            raise DomainError(f"loading must be >= -1, got {self.loading!r}")
        if not 0.0 <= self.indemnity <= self.scenario.L:
            raise DomainError(f"indemnity must lie in [0, L], got {self.indemnity!r}")


@dataclass(frozen=True)
class CoverageDecision:
    accept: bool
    q_star: float
    lambda_star: float | None
    utility_gain: float
    indifferent: bool = False
    marginal_gain: float = 0.0
    # DT gain of indemnity L; its sign, not utility_gain's, decides accept
    full_cover_gain: float = 0.0


def premium(q: InsuranceQuote) -> float:
    return q.scenario.p * q.indemnity * (1.0 + q.loading)


def lambda_star(f: DistortionFn, s: BinaryLossLottery) -> float:
    """Largest loading at which the agent still buys cover."""
    if s.p == 0.0:
        raise DomainError("lambda* is undefined when the loss probability is 0")
    return ((1.0 - s.p) - f(1.0 - s.p)) / s.p


def marginal_gain(f: DistortionFn, s: BinaryLossLottery, loading: float) -> float:
    """Coefficient ``a(loading)``: DT gain per unit of indemnity."""
    return (1.0 - s.p * (1.0 + loading)) - f(1.0 - s.p)


def coverage_gain(f: DistortionFn, s: BinaryLossLottery, loading: float, indemnity: float) -> float:
    return marginal_gain(f, s, loading) * indemnity


def optimal_coverage(f: DistortionFn, s: BinaryLossLottery, loading: float) -> CoverageDecision:
    if loading < -1.0:
        raise DomainError(f"loading must be >= -1, got {loading!r}")
    a = marginal_gain(f, s, loading)
    lam = lambda_star(f, s) if s.p > 0.0 else None
    if abs(a) <= INDIFFERENCE_TOL:
        return CoverageDecision(True, s.L, lam, 0.0, True, a, a * s.L)
    if a > 0.0:
        return CoverageDecision(True, s.L, lam, a * s.L, False, a, a * s.L)
    return CoverageDecision(False, 0.0, lam, 0.0, False, a, a * s.L)
