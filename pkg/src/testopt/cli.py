"""Command-line interface: solve, sweep, aa, verify.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 precondition
violation.  CSV output is UTF-8 with a mandatory header row and no
timestamps, so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from .affirmative import ALLOWED, BANNED, BLIND, MANDATORY, AAScenario, analyze
from .distributions import NEG_INF, POS_INF
from .model import ObservableCell, Policy
from .oracle import OracleConfig, brute_force_aa, brute_force_flexible
from .regimes import (
    evaluate_policy,
    solve_flexible,
    solve_mandatory,
    solve_restricted,
)
from .scenario import (
    PreconditionError,
    Scenario,
    ScenarioError,
    load_scenario,
)
from .welfare import classify_policy

CASE_NOTES = {
    "ReplicateMandatory": "replicates the mandatory outcome",
    "AcceptAll": "pools everyone and accepts",
    "InteriorTau": "interior pooling cutoff, zero disagreement",
    "FirstBestTau": "first-best cutoff, zero disagreement",
    "AtExpostBar": "cutoff at the blended bar (first best, aligned bars)",
}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if v == POS_INF:
            return "+inf"
        if v == NEG_INF:
            return "-inf"
        return f"{v:.12g}"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        if obj == POS_INF:
            return "+inf"
        if obj == NEG_INF:
            return "-inf"
    return obj


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _policy_dict(p: Policy) -> dict:
    return {
        "imputation": p.imputation,
        "accept_nonsubmitters": p.accept_nonsubmitters,
        "accept_strictly_above": p.accept_strictly_above,
    }


def _cell_report(cell: ObservableCell, regime: str, scenario: Scenario) -> dict:
    if regime == "mandatory":
        policy, outcome = solve_mandatory(cell)
        note = "score required; accept above the blended bar"
    elif regime == "flexible":
        sol = solve_flexible(cell)
        policy, outcome = sol.policy, sol.outcome
        note = CASE_NOTES[sol.case_tag]
    elif regime == "restricted":
        tau = scenario.imputation_for(cell.label)
        policy, outcome = solve_restricted(cell, tau)
        note = "fixed imputation; pool accepted when its mean clears the bar"
    elif regime == "blind":
        policy, outcome = solve_restricted(cell, POS_INF)
        note = (
            "nobody submits; everyone accepted"
            if policy.accept_nonsubmitters
            else "nobody submits; everyone rejected"
        )
    else:
        raise PreconditionError(f"unknown regime {regime!r}")
    fates = classify_policy(cell, policy)
    return {
        "label": cell.label,
        "regime": regime,
        "note": note,
        "policy": _policy_dict(policy),
        "expected_underlying": outcome.expected_underlying,
        "expected_disagreement": outcome.expected_disagreement,
        "college_payoff": outcome.college_payoff,
        "society_payoff": outcome.society_payoff,
        "admit_measure": outcome.admit_measure,
        "fates": [
            {
                "interval": [f.lo, f.hi],
                "classification": f.classification,
                "mandatory_admitted": f.mandatory_admitted,
                "optional_admitted": f.optional_admitted,
            }
            for f in fates
        ],
    }


def cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    reports = [_cell_report(c, args.regime, scenario) for c in scenario.cells]
    if args.json:
        text = json.dumps(_jsonable(reports), indent=2) + "\n"
    else:
        lines = []
        for r in reports:
            lines.append(f"cell {r['label']} [{r['regime']}]: {r['note']}")
            p = r["policy"]
            lines.append(
                f"  policy: imputation={_fmt(p['imputation'])} "
                f"accept_nonsubmitters={_fmt(p['accept_nonsubmitters'])} "
                f"accept_above={_fmt(p['accept_strictly_above'])}"
            )
            lines.append(
                f"  payoff: college={_fmt(r['college_payoff'])} "
                f"(underlying={_fmt(r['expected_underlying'])}, "
                f"disagreement={_fmt(r['expected_disagreement'])}), "
                f"society={_fmt(r['society_payoff'])}, "
                f"admitted={_fmt(r['admit_measure'])}"
            )
            for f in r["fates"]:
                lines.append(
                    f"  ({_fmt(f['interval'][0])}, {_fmt(f['interval'][1])}]: "
                    f"{f['classification']}"
                )
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.cell is None:
        raise PreconditionError("sweep requires --cell")
    cell = scenario.cell(args.cell)
    if args.steps < 2 or not args.tau_max > args.tau_min:
        raise PreconditionError(
            f"degenerate tau range: [{args.tau_min}, {args.tau_max}] "
            f"with {args.steps} steps"
        )
    rows = ["tau,payoff,accepts_nonsubmitters,disagreement,underlying"]
    for tau in np.linspace(args.tau_min, args.tau_max, args.steps):
        policy, outcome = solve_restricted(cell, float(tau))
        rows.append(
            ",".join(
                [
                    _fmt(float(tau)),
                    _fmt(outcome.college_payoff),
                    _fmt(policy.accept_nonsubmitters),
                    _fmt(outcome.expected_disagreement),
                    _fmt(outcome.expected_underlying),
                ]
            )
        )
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_aa(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.aa is None:
        raise PreconditionError("scenario has no 'aa' section")
    s = scenario.aa
    a = analyze(s)
    allowed_totals = {
        reg: sum(a.loss_college[(ALLOWED, reg)]) for reg in (MANDATORY, BLIND)
    }
    best_allowed = (
        MANDATORY if allowed_totals[MANDATORY] <= allowed_totals[BLIND] else BLIND
    )
    report = {
        "ET": a.ET,
        "P_g0": a.P_g0,
        "P_g1": a.P_g1,
        "Delta": a.Delta,
        "college_losses": {
            f"{aa}/{reg}": {
                "allocative": a.loss_college[(aa, reg)][0],
                "social": a.loss_college[(aa, reg)][1],
            }
            for aa in (ALLOWED, BANNED)
            for reg in (MANDATORY, BLIND)
        },
        "society_losses": {
            f"{aa}/{reg}": a.loss_society[(aa, reg)]
            for aa in (ALLOWED, BANNED)
            for reg in (MANDATORY, BLIND)
        },
        "college_best_response": {ALLOWED: best_allowed, BANNED: a.college_pref_banned},
        "beta_star": a.beta_star,
        "delta_star_exists": a.delta_star_exists,
        "delta_star": a.delta_star,
        "Delta_star": a.Delta_star,
        "delta_lower": a.delta_lower,
        "delta_prime": a.delta_prime,
        "delta_bar": a.delta_bar,
        "ban_backfires": a.ban_backfires,
    }
    if args.json:
        text = json.dumps(_jsonable(report), indent=2) + "\n"
    else:
        lines = [
            f"score rate ET={_fmt(a.ET)}  posteriors: low-score {_fmt(a.P_g0)}, "
            f"high-score {_fmt(a.P_g1)}, gap {_fmt(a.Delta)}",
            "college losses (allocative + social):",
        ]
        for aa in (ALLOWED, BANNED):
            for reg in (MANDATORY, BLIND):
                al, so = a.loss_college[(aa, reg)]
                lines.append(f"  {aa}/{reg}: {_fmt(al)} + {_fmt(so)} = {_fmt(al + so)}")
        lines.append("society losses:")
        for aa in (ALLOWED, BANNED):
            for reg in (MANDATORY, BLIND):
                lines.append(f"  {aa}/{reg}: {_fmt(a.loss_society[(aa, reg)])}")
        lines.append(
            f"college best response: allowed -> {best_allowed}, "
            f"banned -> {a.college_pref_banned}"
        )
        if a.Delta > 0:
            lines.append(
                f"thresholds: beta*={_fmt(a.beta_star)} gap*={_fmt(a.Delta_star)} "
                f"delta*={_fmt(a.delta_star) if a.delta_star_exists else 'none (bonus too weak, college never goes blind)'}"
            )
        lines.append(
            f"pressure thresholds: delta_lower={_fmt(a.delta_lower)} "
            f"delta_prime={_fmt(a.delta_prime)} delta_bar={_fmt(a.delta_bar)}"
        )
        if a.ban_backfires:
            lines.append("verdict: ban backfires (college goes blind, society worse off)")
        elif a.college_pref_banned == MANDATORY and not a.delta_star_exists:
            lines.append("verdict: ban benefits society (college never goes blind)")
        else:
            lines.append("verdict: ban benefits society")
        text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        _write_aa_sweep(s, args)
    return 0


def _write_aa_sweep(s: AAScenario, args) -> None:
    lo = args.tau_min if args.tau_min is not None else 0.05
    hi = args.tau_max if args.tau_max is not None else 2.0
    steps = args.steps if args.steps else 40
    if steps < 2 or not hi > lo or lo <= 0:
        raise PreconditionError(
            f"degenerate delta sweep range: [{lo}, {hi}] with {steps} steps"
        )
    rows = [
        "delta,blind_net_benefit,college_choice_banned,"
        "society_loss_allowed_mandatory,society_loss_banned_choice,ban_backfires"
    ]
    for delta in np.linspace(lo, hi, steps):
        sd = AAScenario(s.q, s.p_r, s.p_g, s.beta, s.c, float(delta), s.x1_lo, s.x1_hi)
        soc = sd.society_analysis()
        choice = sd.college_pref_banned()
        rows.append(
            ",".join(
                [
                    _fmt(float(delta)),
                    _fmt(sd.blind_net_benefit()),
                    choice,
                    _fmt(soc.loss_map[(ALLOWED, MANDATORY)]),
                    _fmt(soc.loss_map[(BANNED, choice)]),
                    _fmt(soc.ban_backfires),
                ]
            )
        )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(rows) + "\n")


def _flexible_deviation(cell: ObservableCell, cfg: OracleConfig) -> float:
    """How far the closed-form flexible payoff falls short of the grid optimum,
    net of the payoff variation across one grid step around the optimum."""
    sol = solve_flexible(cell)
    best_tau, best_accept, best_payoff = brute_force_flexible(cell, cfg)
    slack = 0.0
    for tau in (best_tau - cfg.tau_grid_step, best_tau + cfg.tau_grid_step):
        if not np.isfinite(tau):
            continue
        if best_accept:
            p = Policy(tau, True, NEG_INF)
        else:
            from .model import bars as _bars

            p = Policy(tau, False, max(tau, _bars(cell).expost_bar))
        slack = max(slack, abs(evaluate_policy(cell, p).college_payoff - best_payoff))
    return (best_payoff - sol.payoff) - slack


def cmd_verify(args) -> int:
    scenario = load_scenario(args.scenario)
    cfg = OracleConfig(seed=args.seed)
    failures = []
    lines = []

    max_dev = 0.0
    for cell in scenario.cells:
        lo, hi = cell.dist.support()
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise PreconditionError(
                f"cell {cell.label!r} has unbounded support; the oracle needs bounds"
            )
        max_dev = max(max_dev, _flexible_deviation(cell, cfg))
        sol = solve_flexible(cell)
        _, mand = solve_mandatory(cell)
        if sol.payoff < mand.college_payoff - 1e-9:
            failures.append(f"cell {cell.label!r}: flexible below mandatory")
    lines.append(f"flexible solver vs grid oracle: max shortfall {max_dev:.3g}")
    if max_dev > 1e-6:
        failures.append(f"flexible solver off the grid optimum by {max_dev:.3g}")

    if scenario.aa is not None:
        oracle = brute_force_aa(scenario.aa, cfg)
        dev = 0.0
        for aa in (ALLOWED, BANNED):
            for reg in (MANDATORY, BLIND):
                alloc, social = scenario.aa.college_losses(aa, reg)
                soc = scenario.aa.society_loss(aa, reg)
                o = oracle[(aa, reg)]
                for got, want in (
                    (alloc, o["allocative"]),
                    (social, o["social"]),
                    (soc, o["society"]),
                ):
                    dev = max(dev, abs(got - want) / max(1e-12, abs(want), abs(got)))
        lines.append(f"group-bonus closed forms vs quadrature oracle: max rel dev {dev:.3g}")
        if dev > 1e-8:
            failures.append(f"group-bonus losses off the oracle by {dev:.3g} relative")

    for line in lines:
        sys.stdout.write(line + "\n")
    if failures:
        for f in failures:
            sys.stderr.write("FAIL: " + f + "\n")
        return 1
    sys.stdout.write("all checks within tolerance\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="testopt",
        description=(
            "Optimal admissions policies under social pressure across "
            "test-mandatory, test-optional, and test-blind regimes."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON path")
        p.add_argument("--out", default=None, help="write output to this path")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    p_solve = sub.add_parser("solve", help="solve one regime for every cell")
    common(p_solve)
    p_solve.add_argument(
        "--regime",
        required=True,
        choices=["mandatory", "flexible", "restricted", "blind"],
    )
    p_solve.add_argument("--json", action="store_true", help="machine-readable report")
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="payoff curve over an imputation grid")
    common(p_sweep)
    p_sweep.add_argument("--cell", required=True, help="cell label to sweep")
    p_sweep.add_argument("--tau-min", type=float, required=True)
    p_sweep.add_argument("--tau-max", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_aa = sub.add_parser("aa", help="group-bonus regime analysis")
    common(p_aa)
    p_aa.add_argument("--json", action="store_true", help="machine-readable report")
    p_aa.add_argument("--tau-min", type=float, default=None, help="delta sweep start")
    p_aa.add_argument("--tau-max", type=float, default=None, help="delta sweep end")
    p_aa.add_argument("--steps", type=int, default=None, help="delta sweep points")
    p_aa.set_defaults(func=cmd_aa)

    p_verify = sub.add_parser("verify", help="closed forms vs brute-force oracle")
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except PreconditionError as exc:
        sys.stderr.write(f"precondition error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
