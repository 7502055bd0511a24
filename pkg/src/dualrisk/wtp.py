"""Willingness to pay for reducing the probability of losing the asset.

Under the dual functional the WTP never depends on initial wealth:

* eliminating the risk:       ``v(p0, 0)  = [1 - f(1 - p0)] L``
* reducing ``p0`` to ``p1``:  ``v(p0, p1) = [f(1 - p1) - f(1 - p0)] L``

so a partial reduction is the difference of two eliminations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from scipy import optimize

from .distortion import DistortionFn
from .errors import DomainError, NoBracketError
from .lottery import BinaryLossLottery

DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class WtpQuery:
    scenario: BinaryLossLottery
    p_from: float
    p_to: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_from <= 1.0 or not 0.0 <= self.p_to <= 1.0:
            raise DomainError("p_from and p_to must lie in [0, 1]")
        if self.p_to > self.p_from:
            raise DomainError(f"p_to={self.p_to!r} exceeds p_from={self.p_from!r}")

    @classmethod
    def reduce(cls, s: BinaryLossLottery, p_to: float) -> WtpQuery:
        return cls(s, s.p, p_to)


class WtpDecomposition(NamedTuple):
    total_from: float
    total_to: float
    partial: float


class MeanValuePoint(NamedTuple):
    c: float
    unique: bool
    residual: float


def wtp_total(f: DistortionFn, s: BinaryLossLottery) -> float:
    return (1.0 - f(1.0 - s.p)) * s.L


def wtp_partial(f: DistortionFn, q: WtpQuery) -> float:
    if q.p_from == q.p_to:
        return 0.0
    return (f(1.0 - q.p_to) - f(1.0 - q.p_from)) * q.scenario.L


def wtp_neutral(q: WtpQuery) -> float:
    """WTP of a risk-neutral agent, ``(p0 - p1) L``."""
    return (q.p_from - q.p_to) * q.scenario.L


def wtp_decompose(f: DistortionFn, q: WtpQuery) -> WtpDecomposition:
    s = q.scenario
    total_from = wtp_total(f, s.with_p(q.p_from))
    total_to = wtp_total(f, s.with_p(q.p_to))
    return WtpDecomposition(total_from, total_to, wtp_partial(f, q))


def mean_value_point(f: DistortionFn, q: WtpQuery) -> MeanValuePoint:
    """Point ``c`` in ``(1 - p0, 1 - p1)`` with ``f'(c) (p0 - p1) L = v(p0, p1)``.

    Found by bisection of ``f'(c) - slope``. When ``f'`` is constant every
    point qualifies; the midpoint is returned with ``unique=False``.

    Raises
    ------
    DomainError
        If ``p_to == p_from`` (empty interval).
    NoBracketError
        If ``f'`` minus the chord slope does not change sign on the interval,
        which only happens for non-monotone ``f'`` or numerically flat chords.
    """
    if q.p_to >= q.p_from:
        raise DomainError("mean value point needs p_to < p_from")
    a, b = 1.0 - q.p_from, 1.0 - q.p_to
    L = q.scenario.L
    v = wtp_partial(f, q)
    if f.is_identity:
        c = 0.5 * (a + b)
        return MeanValuePoint(c, False, abs(f.derivative(c) * (b - a) * L - v))
    slope = v / ((q.p_from - q.p_to) * L)

    def g(t: float) -> float:
        return f.derivative(t) - slope

    try:
        ga, gb = g(a), g(b)
    except DomainError:
        # derivative diverges at an endpoint; shrink inward
        eps = 1e-12 * (b - a)
        a, b = a + eps, b - eps
        ga, gb = g(a), g(b)
    if ga == 0.0:
        c = a
    elif gb == 0.0:
        c = b
    elif ga * gb > 0.0:
        raise NoBracketError(
            f"f' - chord slope keeps one sign on ({a:g}, {b:g}); f' is not monotone there"
        )
    else:
        c = optimize.bisect(g, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
    residual = abs(f.derivative(c) * (q.p_from - q.p_to) * L - v)
    return MeanValuePoint(c, True, residual)


def proportional_wtp(f: DistortionFn, L: float, p: float, alpha: float) -> float:
    """WTP for cutting the loss probability from ``p`` to ``(1 - alpha) p``."""
    s = BinaryLossLottery(0.0, L, p)
    return wtp_partial(f, WtpQuery(s, p, (1.0 - alpha) * p))


def proportional_wtp_slope(
    f: DistortionFn, L: float, p: float, alpha: float, h: float = DEFAULT_STEP
) -> float:
    """Central difference in ``p`` of :func:`proportional_wtp`."""
    if not h > 0.0:
        raise DomainError(f"finite-difference step must be positive, got {h!r}")
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"reduction fraction must lie in (0, 1], got {alpha!r}")
    if not (0.0 < p - h and p + h < 1.0):
        raise DomainError(f"p={p!r} with step {h!r} leaves (0, 1)")
    up = proportional_wtp(f, L, p + h, alpha)
    down = proportional_wtp(f, L, p - h, alpha)
    return (up - down) / (2.0 * h)
