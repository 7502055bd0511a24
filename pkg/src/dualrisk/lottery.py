"""Finite lotteries and the dual-theory functional.

``dt_value`` ranks outcomes in ascending order and weights the k-th outcome
by ``f(P[X >= x_k]) - f(P[X > x_k])``. It is linear in outcomes, so the
certainty equivalent of a lottery is its DT value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .distortion import DistortionFn
from .errors import DomainError

PROB_TOL = 1e-12


@dataclass(frozen=True)
class Lottery:
    """Canonical finite lottery: strictly ascending outcomes, positive probabilities.

    Build instances with :meth:`from_pairs`, which sorts, merges duplicate
    outcomes and drops zero-probability atoms.
    """

    outcomes: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.outcomes) != len(self.probabilities) or not self.outcomes:
            raise DomainError("lottery needs matching, non-empty outcome and probability lists")
        if any(b <= a for a, b in zip(self.outcomes, self.outcomes[1:])):
            raise DomainError("outcomes must be strictly increasing; use Lottery.from_pairs")
        if any(not 0.0 < p <= 1.0 for p in self.probabilities):
            raise DomainError("probabilities must lie in (0, 1]")
        if abs(sum(self.probabilities) - 1.0) > PROB_TOL:
            raise DomainError(f"probabilities sum to {sum(self.probabilities)!r}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> Lottery:
        merged: dict[float, float] = {}
        for outcome, prob in pairs:
            outcome, prob = float(outcome), float(prob)
            if not np.isfinite(outcome):
                raise DomainError(f"non-finite outcome {outcome!r}")
            if prob < 0.0 or prob > 1.0 or not np.isfinite(prob):
                raise DomainError(f"probability {prob!r} outside [0, 1]")
            if prob == 0.0:
                continue
            merged[outcome] = merged.get(outcome, 0.0) + prob
        if not merged:
            raise DomainError("lottery has no atom with positive probability")
        total = sum(merged.values())
        if abs(total - 1.0) > PROB_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        xs = sorted(merged)
        ps = [merged[x] / total for x in xs]
        return cls(tuple(xs), tuple(ps))

    @classmethod
    def degenerate(cls, b: float) -> Lottery:
        return cls((float(b),), (1.0,))

    @classmethod
    def from_json(cls, text: str) -> Lottery:
        records = json.loads(text)
        return cls.from_pairs((r["outcome"], r["probability"]) for r in records)

    def to_json(self) -> str:
        return json.dumps(
            [{"outcome": x, "probability": p} for x, p in zip(self.outcomes, self.probabilities)]
        )

    def shift(self, c: float) -> Lottery:
        return Lottery.from_pairs((x + c, p) for x, p in self)

    def scale(self, a: float) -> Lottery:
        if a <= 0.0:
            raise DomainError("scale factor must be positive")
        return Lottery.from_pairs((a * x, p) for x, p in self)

    def expectation(self) -> float:
        return float(np.dot(self.outcomes, self.probabilities))

    def __iter__(self):
        return iter(zip(self.outcomes, self.probabilities))

    def __len__(self) -> int:
        return len(self.outcomes)


@dataclass(frozen=True)
class BinaryLossLottery:
    """Wealth ``W0 + X`` with ``X = (0, p; L, 1 - p)``: the asset is lost with probability ``p``."""

    W0: float
    L: float
    p: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.W0):
            raise DomainError("W0 must be finite")
        if not (np.isfinite(self.L) and self.L > 0.0):
            raise DomainError(f"L must be positive, got {self.L!r}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p!r}")

    def with_p(self, p: float) -> BinaryLossLottery:
        return BinaryLossLottery(self.W0, self.L, p)

    def to_lottery(self) -> Lottery:
        return Lottery.from_pairs([(self.W0, self.p), (self.W0 + self.L, 1.0 - self.p)])


def decision_weights(f: DistortionFn, lot: Lottery) -> np.ndarray:
    """Weights ``v_k`` attached to the ascending outcomes of ``lot``."""
    probs = np.asarray(lot.probabilities)
    # tail[k] = P(X >= x_k), summed from the top so small tails stay accurate
    tail = np.cumsum(probs[::-1])[::-1]
    tail[0] = 1.0
    upper = np.append(tail[1:], 0.0)
    return np.asarray(f(tail)) - np.asarray(f(upper))


def dt_value(f: DistortionFn, lot: Lottery) -> float:
    return float(np.dot(decision_weights(f, lot), lot.outcomes))


def dt_two_point(f: DistortionFn, a, b, prob_b):
    """DT value of ``(a, 1 - prob_b; b, prob_b)``, vectorised over numpy arrays.

    The outcomes may come in either order; ranking is done elementwise.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    prob_b = np.asarray(prob_b, dtype=float)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    p_hi = np.where(b >= a, prob_b, 1.0 - prob_b)
    out = lo + np.asarray(f(p_hi)) * (hi - lo)
    return float(out) if out.ndim == 0 else out


def certainty_equivalent(f: DistortionFn, lot: Lottery) -> float:
    """Sure amount indifferent to ``lot``; equal to its DT value."""
    return dt_value(f, lot)


def dt_initial_wealth(f: DistortionFn, s: BinaryLossLottery) -> float:
    return s.W0 + f(1.0 - s.p) * s.L


def risk_premium(f: DistortionFn, s: BinaryLossLottery) -> float:
    """Expected wealth minus certainty equivalent, ``[(1 - p) - f(1 - p)] L``."""
    return ((1.0 - s.p) - f(1.0 - s.p)) * s.L


def dt_batch(f: DistortionFn, lotteries: Sequence[Lottery]) -> list[float]:
    return [dt_value(f, lot) for lot in lotteries]
