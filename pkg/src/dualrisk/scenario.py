"""JSON scenario files.

Example::

    {
      "wealth": 50, "loss": 100, "p0": 0.5, "loading": 0.6,
      "distortion": {"family": "power", "gamma": 2.0},
      "cost": {"family": "linear", "k": 0.1},
      "sweep": {"parameter": "x", "lo": 0.001, "hi": 0.03, "steps": 30}
    }

Structural problems (bad JSON, unknown or missing fields, non-numbers) raise
:class:`ScenarioError`; values outside their domain raise
:class:`DomainError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .distortion import DistortionFn
from .errors import DomainError, ScenarioError
from .lottery import BinaryLossLottery
from .policy import CostSchedule, PolicyScenario

SWEEP_PARAMETERS = ("p0", "loading", "gamma", "k", "x")
_TOP_FIELDS = {"wealth", "loss", "p0", "loading", "distortion", "cost", "sweep", "p_to"}
_REQUIRED = {"wealth", "loss", "p0", "loading", "distortion"}
_SWEEP_FIELDS = {"parameter", "lo", "hi", "steps", "reduction"}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    lo: float
    hi: float
    steps: int
    reduction: float = 0.5

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ScenarioError(
                f"sweep.parameter must be one of {', '.join(SWEEP_PARAMETERS)}, got {self.parameter!r}"
            )
        if self.steps < 1:
            raise DomainError(f"sweep.steps must be >= 1, got {self.steps}")
        if self.hi < self.lo:
            raise DomainError("sweep.hi must not be below sweep.lo")
        if not 0.0 < self.reduction <= 1.0:
            raise DomainError(f"sweep.reduction must lie in (0, 1], got {self.reduction!r}")

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.lo]
        step = (self.hi - self.lo) / (self.steps - 1)
        return [self.lo + i * step for i in range(self.steps - 1)] + [self.hi]


@dataclass(frozen=True)
class ScenarioFile:
    wealth: float
    loss: float
    p0: float
    loading: float
    distortion: DistortionFn
    cost: CostSchedule | None = None
    sweep: SweepSpec | None = None
    p_to: float | None = None

    @property
    def lottery(self) -> BinaryLossLottery:
        return BinaryLossLottery(self.wealth, self.loss, self.p0)

    def policy(self) -> PolicyScenario:
        if self.cost is None:
            raise ScenarioError("field 'cost' is required for the insurer policy")
        return PolicyScenario(self.lottery, self.loading, self.cost, self.distortion)

    def replace(self, **changes: Any) -> ScenarioFile:
        fields = {name: getattr(self, name) for name in self.__dataclass_fields__}
        fields.update(changes)
        return ScenarioFile(**fields)


def _number(record: dict, key: str, where: str = "") -> float:
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"field '{where}{key}' must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"field '{where}{key}' must be finite")
    return value


def parse_scenario(data: Any) -> ScenarioFile:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise ScenarioError(f"unknown field(s): {', '.join(sorted(unknown))}")
    missing = _REQUIRED - set(data)
    if missing:
        raise ScenarioError(f"missing field(s): {', '.join(sorted(missing))}")
    wealth = _number(data, "wealth")
    loss = _number(data, "loss")
    p0 = _number(data, "p0")
    loading = _number(data, "loading")

    if not isinstance(data["distortion"], dict):
        raise ScenarioError("field 'distortion' must be an object")
    try:
        distortion = DistortionFn.from_dict(data["distortion"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, (ScenarioError, DomainError)):
            raise type(exc)(f"field 'distortion': {exc}") from None
        raise ScenarioError(f"field 'distortion': {exc}") from None

    cost = None
    if data.get("cost") is not None:
        if not isinstance(data["cost"], dict):
            raise ScenarioError("field 'cost' must be an object")
        try:
            cost = CostSchedule.from_dict(data["cost"])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, (ScenarioError, DomainError)):
                raise type(exc)(f"field 'cost': {exc}") from None
            raise ScenarioError(f"field 'cost': {exc}") from None

    sweep = None
    if data.get("sweep") is not None:
        raw = data["sweep"]
        if not isinstance(raw, dict):
            raise ScenarioError("field 'sweep' must be an object")
        unknown = set(raw) - _SWEEP_FIELDS
        if unknown:
            raise ScenarioError(f"unknown field(s) in 'sweep': {', '.join(sorted(unknown))}")
        missing = {"parameter", "lo", "hi", "steps"} - set(raw)
        if missing:
            raise ScenarioError(f"missing field(s) in 'sweep': {', '.join(sorted(missing))}")
        steps = raw["steps"]
        if isinstance(steps, bool) or not isinstance(steps, int):
            raise ScenarioError(f"field 'sweep.steps' must be an integer, got {steps!r}")
        sweep = SweepSpec(
            parameter=str(raw["parameter"]),
            lo=_number(raw, "lo", "sweep."),
            hi=_number(raw, "hi", "sweep."),
            steps=steps,
            reduction=_number(raw, "reduction", "sweep.") if "reduction" in raw else 0.5,
        )

    p_to = _number(data, "p_to") if data.get("p_to") is not None else None
    try:
        BinaryLossLottery(wealth, loss, p0)
    except DomainError as exc:
        raise DomainError(f"scenario: {exc}") from None
    return ScenarioFile(wealth, loss, p0, loading, distortion, cost, sweep, p_to)


def load_scenario(path: str | Path) -> ScenarioFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {path}: {exc}") from None
    return parse_scenario(data)


def scenario_to_dict(sc: ScenarioFile) -> dict:
    out: dict[str, Any] = {
        "wealth": sc.wealth,
        "loss": sc.loss,
        "p0": sc.p0,
        "loading": sc.loading,
        "distortion": sc.distortion.to_dict(),
    }
    if sc.cost is not None:
        out["cost"] = sc.cost.to_dict()
    if sc.sweep is not None:
        out["sweep"] = {
            "parameter": sc.sweep.parameter,
            "lo": sc.sweep.lo,
            "hi": sc.sweep.hi,
            "steps": sc.sweep.steps,
            "reduction": sc.sweep.reduction,
        }
    if sc.p_to is not None:
        out["p_to"] = sc.p_to
    return out
