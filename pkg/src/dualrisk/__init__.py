"""Willingness to pay, insurance demand and insurer policy under Yaari's dual theory."""

from .distortion import DistortionFn, RiskAttitude
from .errors import (
    DegenerateRegionError,
    DomainError,
    DualRiskError,
    EmptyAdmissibleError,
    MaxIterError,
    NoBracketError,
    RegimeError,
    ScenarioError,
    SignError,
)
from .insurance import CoverageDecision, InsuranceQuote, lambda_star, optimal_coverage, premium
from .lottery import (
    BinaryLossLottery,
    Lottery,
    certainty_equivalent,
    dt_initial_wealth,
    dt_value,
    risk_premium,
)
from .policy import (
    CostSchedule,
    PolicyScenario,
    PolicySolution,
    admissible_set,
    alpha_coverage,
    insurer_objective,
    optimize_policy,
    prop6_interval,
    surplus,
)
from .wtp import (
    WtpQuery,
    mean_value_point,
    proportional_wtp_slope,
    wtp_decompose,
    wtp_partial,
    wtp_total,
)

__version__ = "0.1.0"
