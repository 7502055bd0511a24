"""Probability distortion functions.

A distortion ``f`` maps decumulative probabilities in [0, 1] onto decision
weights. Convex distortions underweight the good tail and describe strong
risk aversion; the identity recovers expected value.

Four parametric families are available::

    identity            f(t) = t
    power(gamma)        f(t) = t**gamma
    prelec(alpha, beta) f(t) = exp(-beta * (-ln t)**alpha)
    convex_mix(w, g)    f(t) = w*t + (1 - w)*t**g

Every method accepts a float or a numpy array and returns the same kind.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError, ScenarioError

DOMAIN_TOL = 1e-12

FAMILIES = ("identity", "power", "prelec", "convex_mix")


class RiskAttitude(enum.Enum):
    NEUTRAL = "neutral"
    STRONGLY_AVERSE = "strongly_averse"
    NON_CONVEX = "non_convex"


def _as_unit(t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("probability argument is NaN")
    if np.any(arr < -DOMAIN_TOL) or np.any(arr > 1.0 + DOMAIN_TOL):
        raise DomainError(f"probability argument outside [0, 1]: {t!r}")
    return np.clip(arr, 0.0, 1.0)


def _out(arr, like):
    if np.ndim(like) == 0:
        return float(arr)
    return arr


@dataclass(frozen=True)
class DistortionFn:
    """A parametric probability distortion.

    Use the constructors :meth:`identity`, :meth:`power`, :meth:`prelec`
    and :meth:`convex_mix` rather than filling the fields by hand; the
    fields not used by ``family`` stay ``None``.
    """

    family: str
    gamma: float | None = None
    alpha: float | None = None
    beta: float | None = None
    weight: float | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise DomainError(f"unknown distortion family {self.family!r}")
        if self.family in ("power", "convex_mix"):
            _require_positive("gamma", self.gamma)
        if self.family == "prelec":
            _require_positive("alpha", self.alpha)
            _require_positive("beta", self.beta)
        if self.family == "convex_mix":
            if self.weight is None or not 0.0 <= self.weight <= 1.0:
                raise DomainError(f"weight must lie in [0, 1], got {self.weight!r}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def identity(cls) -> DistortionFn:
        return cls("identity")

    @classmethod
    def power(cls, gamma: float) -> DistortionFn:
        return cls("power", gamma=float(gamma))

    @classmethod
    def prelec(cls, alpha: float, beta: float = 1.0) -> DistortionFn:
        return cls("prelec", alpha=float(alpha), beta=float(beta))

    @classmethod
    def convex_mix(cls, weight: float, gamma: float) -> DistortionFn:
        return cls("convex_mix", gamma=float(gamma), weight=float(weight))

    @classmethod
    def from_dict(cls, spec: dict[str, Any]) -> DistortionFn:
        """Build from a record such as ``{"family": "power", "gamma": 2.0}``."""
        spec = dict(spec)
        family = str(spec.pop("family", "")).lower().replace("-", "_")
        allowed = {
            "identity": set(),
            "power": {"gamma"},
            "prelec": {"alpha", "beta"},
            "convex_mix": {"weight", "gamma"},
        }
        if family not in allowed:
            raise ScenarioError(f"unknown distortion family {family!r}")
        unknown = set(spec) - allowed[family]
        if unknown:
            raise ScenarioError(f"unknown field(s) for {family} distortion: {sorted(unknown)}")
        if family == "prelec":
            spec.setdefault("beta", 1.0)
        missing = allowed[family] - set(spec)
        if missing:
            raise ScenarioError(f"missing field(s) for {family} distortion: {sorted(missing)}")
        return cls(family, **{k: float(v) for k, v in spec.items()})

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family}
        for name in ("gamma", "alpha", "beta", "weight"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    # -- evaluation -------------------------------------------------------

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        """Return ``f(t)``; the endpoints map to exactly 0 and 1."""
        x = _as_unit(t)
        if self.family == "identity":
            y = x.copy()
        elif self.family == "power":
            y = x**self.gamma
        elif self.family == "convex_mix":
            y = self.weight * x + (1.0 - self.weight) * x**self.gamma
        else:
            with np.errstate(divide="ignore"):
                s = -np.log(np.where(x > 0.0, x, 1.0))
            y = np.where(x > 0.0, np.exp(-self.beta * s**self.alpha), 0.0)
        y = np.where(x == 0.0, 0.0, np.where(x == 1.0, 1.0, y))
        return _out(y, t)

    def increment(self, t, dt):
        """``f(t + dt) - f(t)`` without the cancellation of a plain difference for small ``dt``."""
        t_arr = _as_unit(t)
        dt_arr = np.asarray(dt, dtype=float)
        _as_unit(t_arr + dt_arr)
        if self.family == "identity":
            out = np.broadcast_to(dt_arr, np.broadcast(t_arr, dt_arr).shape).astype(float)
        elif self.family in ("power", "convex_mix"):
            # relative form only where |dt| < t; elsewhere the plain difference is accurate
            small = np.abs(dt_arr) < t_arr
            ratio = np.where(small, dt_arr / np.where(small, t_arr, 1.0), 0.0)
            rel = np.expm1(self.gamma * np.log1p(ratio))
            direct = (t_arr + dt_arr) ** self.gamma - t_arr**self.gamma
            out = np.where(small, t_arr**self.gamma * rel, direct)
            if self.family == "convex_mix":
                out = self.weight * dt_arr + (1.0 - self.weight) * out
        else:
            out = np.asarray(self.evaluate(t_arr + dt_arr)) - np.asarray(self.evaluate(t_arr))
        like = dt if np.ndim(dt) else t
        return _out(out, like)

    def derivative(self, t):
        """Analytic first derivative.

        Endpoints are accepted when the derivative is finite there; a
        divergent derivative (Power with gamma < 1 at 0, Prelec with
        alpha < 1 at either end) raises :class:`DomainError`.
        """
        x = _as_unit(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.family == "identity":
                d = np.ones_like(x)
            elif self.family == "power":
                d = self.gamma * x ** (self.gamma - 1.0)
            elif self.family == "convex_mix":
                d = self.weight + (1.0 - self.weight) * self.gamma * x ** (self.gamma - 1.0)
            else:
                d = self._prelec_derivative(x)
        if not np.all(np.isfinite(d)):
            raise DomainError(f"derivative of {self.family} distortion diverges at {t!r}")
        return _out(d, t)

    def _prelec_derivative(self, x):
        a, b = self.alpha, self.beta
        inner = (x > 0.0) & (x < 1.0)
        xs = np.where(inner, x, 0.5)
        s = -np.log(xs)
        d = np.exp(-b * s**a) * a * b * s ** (a - 1.0) / xs
        # limits at the endpoints
        if a == 1.0:
            at0 = 0.0 if b > 1.0 else (1.0 if b == 1.0 else np.inf)
            at1 = b
        else:
            at0 = 0.0 if a > 1.0 else np.inf
            at1 = 0.0 if a > 1.0 else np.inf
        return np.where(inner, d, np.where(x == 0.0, at0, at1))

    def second_derivative(self, t):
        """Analytic second derivative, available for identity and power only."""
        x = _as_unit(t)
        if self.family == "identity":
            return _out(np.zeros_like(x), t)
        if self.family == "power":
            g = self.gamma
            with np.errstate(divide="ignore", invalid="ignore"):
                d2 = g * (g - 1.0) * x ** (g - 2.0) if g != 1.0 else np.zeros_like(x)
            if not np.all(np.isfinite(d2)):
                raise DomainError(f"second derivative diverges at {t!r}")
            return _out(d2, t)
        raise NotImplementedError(f"second derivative not provided for {self.family}")

    # -- shape ------------------------------------------------------------

    @property
    def is_identity(self) -> bool:
        """True when the parameters collapse the family onto ``f(t) = t``."""
        if self.family == "identity":
            return True
        if self.family == "power":
            return self.gamma == 1.0
        if self.family == "convex_mix":
            return self.weight == 1.0 or self.gamma == 1.0
        return self.alpha == 1.0 and self.beta == 1.0

    def classify(self) -> RiskAttitude:
        """Risk attitude implied by the shape of ``f``.

        Prelec is convex on the whole unit interval only when it reduces to
        a power function (alpha = 1, beta > 1); any other alpha makes it
        concave near one of the endpoints.
        """
        if self.is_identity:
            return RiskAttitude.NEUTRAL
        if self.family in ("power", "convex_mix"):
            convex = self.gamma > 1.0
        else:
            convex = self.alpha == 1.0 and self.beta > 1.0
        return RiskAttitude.STRONGLY_AVERSE if convex else RiskAttitude.NON_CONVEX

    def __str__(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.to_dict().items() if k != "family")
        return f"{self.family}({args})"


def _require_positive(name: str, value: float | None) -> None:
    if value is None or not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be a positive real, got {value!r}")


def evaluate(f: DistortionFn, t):
    return f.evaluate(t)


def derivative(f: DistortionFn, t):
    return f.derivative(t)


def classify(f: DistortionFn) -> RiskAttitude:
    return f.classify()
