"""Optimal policies and payoff evaluation for the three testing regimes.

All regimes reduce to evaluating one policy shape: an imputation level tau
(scores at or below it are pooled) plus a monotone acceptance threshold on
submitted scores.  The flexible-imputation solver picks tau in closed form;
the restricted solver takes tau as given and best-responds on acceptance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import (
    NEG_INF,
    POS_INF,
    Discrete,
    ScoreDistribution,
    lower_expectation_inverse,
)
from .model import (
    Bars,
    ObservableCell,
    Policy,
    RegimeOutcome,
    ScoreRegion,
    bars,
    disagreement,
)

# Case tags for the flexible-imputation solution.
REPLICATE_MANDATORY = "ReplicateMandatory"
ACCEPT_ALL = "AcceptAll"
INTERIOR_TAU = "InteriorTau"
FIRST_BEST_TAU = "FirstBestTau"
AT_EXPOST_BAR = "AtExpostBar"


@dataclass(frozen=True)
class FlexibleSolution:
    policy: Policy
    outcome: RegimeOutcome
    payoff: float
    case_tag: str
    t_circ: float
    t_dagger: float


def evaluate_policy(cell: ObservableCell, p: Policy) -> RegimeOutcome:
    """Expected outcome of a policy: pooled non-submitters at their conditional
    mean, separated submitters pointwise."""
    d = cell.dist
    tau = p.imputation
    ucv, ucw = cell.college.v, cell.college.w
    usv, usw = cell.society.v, cell.society.w
    sbar = cell.society.bar()

    underlying = 0.0
    disagree = 0.0
    society = 0.0
    admit = 0.0
    regions: list[ScoreRegion] = []

    pool_mass = 1.0 - d.upper_mass(tau)
    if pool_mass > 0.0:
        pooled_score = d.lower_expectation(tau)
        disagree += pool_mass * disagreement(cell, pooled_score, p.accept_nonsubmitters)
        if p.accept_nonsubmitters:
            underlying += d.partial_expectation(NEG_INF, tau, ucv, ucw)
            society += d.partial_expectation(NEG_INF, tau, usv, usw)
            admit += pool_mass
        regions.append(ScoreRegion(NEG_INF, tau, p.accept_nonsubmitters, True))

    a_eff = max(tau, p.accept_strictly_above)
    if a_eff > tau:
        # rejected submitters in (tau, a_eff]; only scores past society's bar
        # generate disagreement
        rej_lo = max(tau, sbar)
        if a_eff > rej_lo:
            disagree += d.partial_expectation(rej_lo, a_eff, usv, usw)
        regions.append(ScoreRegion(tau, a_eff, False, False))

    accept_mass = d.upper_mass(a_eff)
    if accept_mass > 0.0:
        underlying += d.partial_expectation(a_eff, POS_INF, ucv, ucw)
        society += d.partial_expectation(a_eff, POS_INF, usv, usw)
        admit += accept_mass
        if sbar > a_eff:
            # accepted scores society would reject
            disagree += -d.partial_expectation(a_eff, sbar, usv, usw)
        regions.append(ScoreRegion(a_eff, POS_INF, True, False))

    payoff = underlying - cell.delta * disagree
    return RegimeOutcome(
        expected_underlying=underlying,
        expected_disagreement=disagree,
        college_payoff=payoff,
        society_payoff=society,
        admit_measure=admit,
        admitted_sets=tuple(regions),
    )


def solve_mandatory(cell: ObservableCell) -> tuple[Policy, RegimeOutcome]:
    """Everyone submits; accept exactly the scores with positive blended utility."""
    b = bars(cell)
    p = Policy(NEG_INF, False, b.expost_bar)
    return p, evaluate_policy(cell, p)


def solve_flexible(cell: ObservableCell) -> FlexibleSolution:
    b = bars(cell)
    d = cell.dist
    t_dagger = lower_expectation_inverse(d, b.expost_bar)
    t_circ = lower_expectation_inverse(d, b.society_bar)

    scale = max(1.0, abs(b.college_bar), abs(b.society_bar))
    if abs(b.college_bar - b.society_bar) <= 1e-12 * scale:
        # aligned preferences: the blended bar is the first best for both
        pol = Policy(b.expost_bar, False, b.expost_bar)
        out = evaluate_policy(cell, pol)
        return FlexibleSolution(pol, out, out.college_payoff, AT_EXPOST_BAR, t_circ, t_dagger)

    if b.college_bar < b.society_bar:
        return _solve_less_selective(cell, b, t_circ, t_dagger)
    return _solve_more_selective(cell, b, t_circ, t_dagger)


def _solve_less_selective(
    cell: ObservableCell, b: Bars, t_circ: float, t_dagger: float
) -> FlexibleSolution:
    # dichotomy: either replicate the mandatory outcome or pool and accept
    # everyone; intermediate imputations are dominated
    rep = Policy(b.expost_bar, False, b.expost_bar)
    rep_out = evaluate_policy(cell, rep)
    acc = Policy(POS_INF, True, NEG_INF)
    acc_out = evaluate_policy(cell, acc)
    if acc_out.college_payoff > rep_out.college_payoff:
        return FlexibleSolution(
            acc, acc_out, acc_out.college_payoff, ACCEPT_ALL, t_circ, t_dagger
        )
    return FlexibleSolution(
        rep, rep_out, rep_out.college_payoff, REPLICATE_MANDATORY, t_circ, t_dagger
    )


def _solve_more_selective(
    cell: ObservableCell, b: Bars, t_circ: float, t_dagger: float
) -> FlexibleSolution:
    lo_bound, hi_bound = b.expost_bar, b.college_bar

    if isinstance(cell.dist, Discrete):
        tau, t_circ = _best_discrete_pool_boundary(cell, lo_bound, hi_bound, t_circ)
    else:
        tau = min(max(t_circ, lo_bound), hi_bound)

    if tau <= lo_bound:
        tag = AT_EXPOST_BAR
    elif tau >= hi_bound:
        tag = FIRST_BEST_TAU
    else:
        tag = INTERIOR_TAU
    pol = Policy(tau, False, tau)
    out = evaluate_policy(cell, pol)
    return FlexibleSolution(pol, out, out.college_payoff, tag, t_circ, t_dagger)


def _best_discrete_pool_boundary(
    cell: ObservableCell, lo_bound: float, hi_bound: float, t_circ: float
) -> tuple[float, float]:
    """Pool boundary for an atomic score law, by enumerating the finitely many
    distinct pools reachable with tau in [lo_bound, hi_bound].

    The conditional mean below tau is a step function, so the continuous
    crossing rule can overshoot by up to one atom; placing tau at an atom
    includes it in the pool, placing it at the midpoint just below excludes it.
    Both candidates are evaluated and the better one kept (ties -> larger pool).
    """
    atoms = [t for t, _ in cell.dist.atoms]
    candidates = {lo_bound, hi_bound}
    for i, a in enumerate(atoms):
        if lo_bound <= a <= hi_bound:
            candidates.add(a)
        below = atoms[i - 1] + 0.5 * (a - atoms[i - 1]) if i > 0 else a - 1.0
        if lo_bound <= below <= hi_bound:
            candidates.add(below)

    best_tau = lo_bound
    best_payoff = NEG_INF
    for tau in sorted(candidates):
        out = evaluate_policy(cell, Policy(tau, False, tau))
        if out.college_payoff >= best_payoff - 1e-15 and (
            out.college_payoff > best_payoff + 1e-15 or tau > best_tau
        ):
            best_tau, best_payoff = tau, out.college_payoff

    # report the crossing point consistently with the chosen boundary
    clamped = min(max(t_circ, lo_bound), hi_bound)
    if abs(clamped - best_tau) <= 1e-12:
        return best_tau, t_circ
    return best_tau, best_tau


def solve_restricted(
    cell: ObservableCell, tau: float
) -> tuple[Policy, RegimeOutcome]:
    """Best acceptance response to an exogenously fixed imputation level.

    Submitters are accepted above max(tau, blended bar); the pool is accepted
    exactly when its conditional mean clears the blended bar.  tau = +inf is
    test blind.
    """
    b = bars(cell)
    d = cell.dist
    pool_mass = 1.0 - d.upper_mass(tau)
    accept_pool = pool_mass > 0.0 and d.lower_expectation(tau) > b.expost_bar
    if accept_pool:
        p = Policy(tau, True, tau)
    else:
        p = Policy(tau, False, max(tau, b.expost_bar))
    return p, evaluate_policy(cell, p)


def nonsubmitter_threshold(cell: ObservableCell) -> float:
    """Imputation level above which the pooled non-submitters get accepted."""
    b = bars(cell)
    lo, _ = cell.dist.support()
    if b.expost_bar < lo:
        return lo
    return lower_expectation_inverse(cell.dist, b.expost_bar)


def payoff_curve(
    cell: ObservableCell, taus: list[float]
) -> list[tuple[float, float, bool]]:
    out = []
    for tau in taus:
        p, res = solve_restricted(cell, tau)
        out.append((tau, res.college_payoff, p.accept_nonsubmitters))
    return out


def pooled_disagreement(
    cell: ObservableCell, tau_l: float, tau_h: float, accept: bool
) -> float:
    """Disagreement from handing all scores in (tau_l, tau_h] one decision at
    their pooled conditional mean (unscaled by the pressure intensity)."""
    d = cell.dist
    mass = d.upper_mass(tau_l) - d.upper_mass(tau_h)
    if mass <= 0.0:
        return 0.0
    pooled = d.partial_expectation(tau_l, tau_h, 0.0, 1.0) / mass
    return mass * disagreement(cell, pooled, accept)


def separated_disagreement(
    cell: ObservableCell, tau_l: float, tau_h: float, accept: bool
) -> float:
    """Disagreement from the same decision applied score by score."""
    d = cell.dist
    sbar = cell.society.bar()
    usv, usw = cell.society.v, cell.society.w
    if accept:
        hi = min(tau_h, sbar)
        if hi <= tau_l:
            return 0.0
        return -d.partial_expectation(tau_l, hi, usv, usw)
    lo = max(tau_l, sbar)
    if tau_h <= lo:
        return 0.0
    return d.partial_expectation(lo, tau_h, usv, usw)
