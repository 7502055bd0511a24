"""Command-line front end.

Exit codes: 0 success, 2 unparseable input, 3 value outside its domain or
the insurer regime, 4 empty or degenerate admissible set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

from . import oracle
from .errors import (
    DegenerateRegionError,
    DomainError,
    EmptyAdmissibleError,
    NoBracketError,
    ScenarioError,
)
from .insurance import InsuranceQuote, lambda_star, optimal_coverage, premium
from .lottery import dt_value, risk_premium
from .policy import (
    a_term,
    admissible_set,
    alpha_coverage,
    default_grid,
    insurer_objective,
    marginal_surplus,
    optimize_policy,
    prop6_interval,
    surplus,
)
from .scenario import ScenarioFile, load_scenario
from .wtp import (
    WtpQuery,
    mean_value_point,
    proportional_wtp,
    wtp_decompose,
    wtp_neutral,
)

EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_INFEASIBLE = 4

COMMON_SWEEP_COLUMNS = [
    "parameter", "value", "p0", "loading", "lambda_star", "risk_premium", "wtp_total",
    "wtp_proportional", "wtp_proportional_neutral", "accept", "q_star", "utility_gain",
]
X_SWEEP_COLUMNS = [
    "parameter", "value", "surplus", "marginal_surplus", "a_term", "alpha", "objective",
    "net_expected_profit", "x_bar",
]

SWEEP_EPILOG = f"""\
sweep columns (fixed order):
  p0, loading, gamma, k:  {', '.join(COMMON_SWEEP_COLUMNS)}
  x:                      {', '.join(X_SWEEP_COLUMNS)}
wtp_proportional is the WTP for cutting p0 by the fraction sweep.reduction
(default 0.5). The x sweep needs a cost schedule and loading > lambda*.
"""


# -- records ---------------------------------------------------------------------


def wtp_record(sc: ScenarioFile, p_to: float, verify: bool = False) -> dict[str, Any]:
    f, s = sc.distortion, sc.lottery
    q = WtpQuery(s, s.p, p_to)
    parts = wtp_decompose(f, q)
    record: dict[str, Any] = {
        "p0": s.p,
        "p_to": p_to,
        "loss": s.L,
        "wtp_total": parts.total_from,
        "wtp_total_to": parts.total_to,
        "wtp_partial": parts.partial,
        "neutral_total": s.p * s.L,
        "neutral_partial": wtp_neutral(q),
        "risk_premium": risk_premium(f, s),
        "mean_value_point": None,
        "mean_value_unique": None,
    }
    if p_to < s.p:
        try:
            mvp = mean_value_point(f, q)
            record["mean_value_point"] = mvp.c
            record["mean_value_unique"] = mvp.unique
        except NoBracketError:
            pass
    if verify:
        cfg = oracle.BisectionConfig(abs_tol=1e-13)
        total = oracle.indifference_wtp(f, s, 0.0, cfg)
        partial = oracle.indifference_wtp(f, s, p_to, cfg)
        record.update(
            oracle_wtp_total=total,
            oracle_wtp_partial=partial,
            dev_wtp_total=abs(total - parts.total_from),
            dev_wtp_partial=abs(partial - parts.partial),
        )
    return record


def premium_record(sc: ScenarioFile, indemnity: float | None) -> dict[str, Any]:
    s = sc.lottery
    q = s.L if indemnity is None else indemnity
    quote = InsuranceQuote(s, sc.loading, q)
    return {"p0": s.p, "loading": sc.loading, "indemnity": q, "premium": premium(quote)}


def lambda_star_record(sc: ScenarioFile, verify: bool = False) -> dict[str, Any]:
    f, s = sc.distortion, sc.lottery
    lam = lambda_star(f, s)
    record: dict[str, Any] = {
        "p0": s.p,
        "loading": sc.loading,
        "lambda_star": lam,
        "risk_premium": risk_premium(f, s),
        "accept": sc.loading <= lam,
    }
    if verify:
        boundary = oracle.acceptance_boundary(f, s, oracle.BisectionConfig(abs_tol=1e-13))
        record.update(oracle_lambda_star=boundary, dev_lambda_star=abs(boundary - lam))
    return record


def coverage_record(sc: ScenarioFile, verify: bool = False, grid: int = 10_001) -> dict[str, Any]:
    f, s = sc.distortion, sc.lottery
    d = optimal_coverage(f, s, sc.loading)
    record: dict[str, Any] = {
        "p0": s.p,
        "loading": sc.loading,
        "lambda_star": d.lambda_star,
        "accept": d.accept,
        "indifferent": d.indifferent,
        "q_star": d.q_star,
        "utility_gain": d.utility_gain,
        "full_cover_gain": d.full_cover_gain,
        "premium": premium(InsuranceQuote(s, sc.loading, d.q_star)),
    }
    if verify:
        base = dt_value(f, s.to_lottery())
        q_best, value = oracle.grid_maximize(
            lambda q: oracle.coverage_values(f, s, sc.loading, q), 0.0, s.L, grid, vectorized=True
        )
        record.update(
            oracle_q_star=q_best,
            oracle_utility_gain=value - base,
            dev_utility_gain=abs(value - base - d.utility_gain),
        )
    return record


def policy_record(sc: ScenarioFile, grid: int, verify: bool = False):
    ps = sc.policy()
    sol = optimize_policy(ps, grid)
    intervals = admissible_set(ps, grid)
    record: dict[str, Any] = {
        "lambda_star": sol.lambda_star,
        "loading": ps.loading,
        "x_bar": sol.x_bar,
        "admissible_lo": sol.admissible_interval[0],
        "admissible_hi": sol.admissible_interval[1],
        "admissible_intervals": len(intervals),
        "x_star": sol.x_star,
        "alpha_star": sol.alpha_star,
        "objective": sol.objective,
        "net_expected_profit": sol.net_expected_profit,
        "surplus_at_x": sol.surplus_at_x,
        "pc_residual": sol.pc_residual,
        "saturated": sol.saturated,
        "interior": sol.interior,
        "stationarity": sol.stationarity,
    }
    if verify:
        lo, hi = sol.admissible_interval
        x_grid, value = oracle.policy_objective_grid(
            ps.distortion, ps.scenario, ps.loading, ps.cost, lo, hi, grid
        )
        record.update(oracle_x_star=x_grid, oracle_objective=value,
                      dev_objective=abs(value - sol.objective))
    return record, ps, sol


def _common_row(sc: ScenarioFile, parameter: str, value: float, reduction: float) -> dict[str, Any]:
    f, s = sc.distortion, sc.lottery
    d = optimal_coverage(f, s, sc.loading)
    parts = wtp_decompose(f, WtpQuery(s, s.p, 0.0))
    return {
        "parameter": parameter,
        "value": value,
        "p0": s.p,
        "loading": sc.loading,
        "lambda_star": lambda_star(f, s),
        "risk_premium": risk_premium(f, s),
        "wtp_total": parts.total_from,
        "wtp_proportional": proportional_wtp(f, s.L, s.p, reduction),
        "wtp_proportional_neutral": reduction * s.p * s.L,
        "accept": d.accept,
        "q_star": d.q_star,
        "utility_gain": d.utility_gain,
    }


def _vary(sc: ScenarioFile, parameter: str, value: float) -> ScenarioFile:
    if parameter == "p0":
        return sc.replace(p0=value)
    if parameter == "loading":
        return sc.replace(loading=value)
    if parameter == "gamma":
        if sc.distortion.gamma is None:
            raise DomainError(f"distortion family {sc.distortion.family} has no gamma to sweep")
        spec = sc.distortion.to_dict() | {"gamma": value}
        return sc.replace(distortion=type(sc.distortion).from_dict(spec))
    if parameter == "k":
        if sc.cost is None:
            raise DomainError("sweeping k needs a cost schedule")
        return sc.replace(cost=type(sc.cost).from_dict(sc.cost.to_dict() | {"k": value}))
    raise DomainError(f"cannot sweep {parameter!r}")


def sweep_rows(sc: ScenarioFile) -> tuple[list[str], list[dict[str, Any]]]:
    """Every row of the sweep; all grid points are validated before any is returned."""
    if sc.sweep is None:
        raise ScenarioError("field 'sweep' is required for the sweep command")
    spec = sc.sweep
    values = spec.values()
    if spec.parameter == "x":
        ps = sc.policy()
        ps.require_regime()
        _, x_bar = prop6_interval(ps)
        for x in values:
            if not 0.0 < x < ps.p:
                raise DomainError(f"sweep value x={x!r} outside (0, p0={ps.p!r})")
            alpha_coverage(ps, x)
        rows = []
        for x in values:
            value = insurer_objective(ps, x)
            rows.append({
                "parameter": "x",
                "value": x,
                "surplus": surplus(ps, x),
                "marginal_surplus": marginal_surplus(ps, x),
                "a_term": a_term(ps, x),
                "alpha": value.alpha,
                "objective": value.objective,
                "net_expected_profit": value.net_expected_profit,
                "x_bar": x_bar,
            })
        return X_SWEEP_COLUMNS, rows
    scenarios = []
    for v in values:
        varied = _vary(sc, spec.parameter, v)
        lot = varied.lottery
        if not 0.0 < lot.p <= 1.0:
            raise DomainError(f"sweep value p0={lot.p!r} outside (0, 1]")
        scenarios.append(varied)
    rows = [_common_row(s, spec.parameter, v, spec.reduction) for s, v in zip(scenarios, values)]
    return COMMON_SWEEP_COLUMNS, rows


# -- output ------------------------------------------------------------------------


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_rows(rows: Sequence[dict[str, Any]], fmt: str, columns: Sequence[str] | None = None,
                single: bool = False) -> str:
    columns = list(columns or rows[0].keys())
    if fmt == "json":
        if single:
            return json.dumps({c: rows[0][c] for c in columns})
        return json.dumps([{c: row[c] for c in columns} for row in rows])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue().rstrip("\n")


# -- argument parsing --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, metavar="PATH", help="JSON scenario file")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default: json, csv for sweep)")
    common.add_argument("--verify", action="store_true",
                        help="append brute-force oracle values and absolute deviations")
    common.add_argument("--grid", type=int, default=None, metavar="N",
                        help="grid size for scans (default: $DUALRISK_GRID_DEFAULT or 100000)")

    parser = _Parser(prog="dualrisk", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("wtp", parents=[common], help="willingness to pay for risk reduction")
    p.add_argument("--p-to", type=float, default=None,
                   help="target loss probability (default: scenario p_to, else 0)")
    p = sub.add_parser("premium", parents=[common], help="premium of an indemnity")
    p.add_argument("--indemnity", type=float, default=None, help="indemnity Q (default: L)")
    sub.add_parser("lambda-star", parents=[common], help="acceptance threshold on the loading")
    sub.add_parser("coverage", parents=[common], help="optimal indemnity at the scenario loading")
    p = sub.add_parser("policy-optimize", parents=[common],
                       help="insurer's optimal reduction and coverage fraction")
    p.add_argument("--plot", metavar="PNG", help="also write a figure of the objective and fraction")
    p = sub.add_parser("sweep", parents=[common], epilog=SWEEP_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter,
                       help="table over the scenario's sweep block")
    p.add_argument("--plot", metavar="PNG", help="also write a figure of every numeric column")
    return parser


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.scenario)
        grid = args.grid if args.grid is not None else default_grid()
        if grid < 100:
            raise DomainError(f"--grid must be at least 100, got {grid}")
        fmt = args.format or ("csv" if args.command == "sweep" else "json")
        if args.command == "wtp":
            p_to = args.p_to if args.p_to is not None else (sc.p_to if sc.p_to is not None else 0.0)
            text = format_rows([wtp_record(sc, p_to, args.verify)], fmt, single=True)
        elif args.command == "premium":
            text = format_rows([premium_record(sc, args.indemnity)], fmt, single=True)
        elif args.command == "lambda-star":
            text = format_rows([lambda_star_record(sc, args.verify)], fmt, single=True)
        elif args.command == "coverage":
            text = format_rows([coverage_record(sc, args.verify)], fmt, single=True)
        elif args.command == "policy-optimize":
            record, ps, sol = policy_record(sc, grid, args.verify)
            text = format_rows([record], fmt, single=True)
            if args.plot:
                from .plotting import plot_policy

                plot_policy(ps, sol, args.plot)
        else:
            columns, rows = sweep_rows(sc)
            text = format_rows(rows, fmt, columns)
            if args.plot:
                from .plotting import plot_sweep

                plot_sweep(rows, sc.sweep.parameter, args.plot, columns)
    except ScenarioError as exc:
        print(f"dualrisk: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (EmptyAdmissibleError, DegenerateRegionError) as exc:
        print(f"dualrisk: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DomainError as exc:
        print(f"dualrisk: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(text, file=out)
    return 0


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
