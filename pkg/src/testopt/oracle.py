"""Brute-force verification engine.

Everything here deliberately avoids the closed-form solvers: policies are
graded on a dense imputation grid, cutoffs are found by bisection on expected
utilities, and losses are integrated numerically.  The test suite holds the
analytic modules to agreement with these results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .affirmative import ALLOWED, BANNED, BLIND, MANDATORY, AAScenario
from .distributions import (
    NEG_INF,
    POS_INF,
    Discrete,
    adaptive_simpson,
    lower_expectation_inverse,
)
from .model import ObservableCell, Policy, RegimeOutcome, bars
from .regimes import evaluate_policy, nonsubmitter_threshold


@dataclass(frozen=True)
class OracleConfig:
    tau_grid_step: float = 0.01
    quadrature_tol: float = 1e-10
    mc_samples: int = 2_000_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tau_grid_step <= 0:
            raise ValueError("tau_grid_step must be positive")
        if self.mc_samples <= 0:
            raise ValueError("mc_samples must be positive")


def brute_force_flexible(
    cell: ObservableCell, cfg: OracleConfig
) -> tuple[float, bool, float]:
    """Grid argmax over imputation levels and pool decisions.

    Submitted scores are accepted above max(tau, blended bar), which is
    pointwise optimal for separated scores; the grid is augmented with every
    analytic landmark so knife-edge optima are not lost to discretization.
    """
    d = cell.dist
    lo, hi = d.support()
    b = bars(cell)
    taus = {NEG_INF, POS_INF, b.college_bar, b.society_bar, b.expost_bar}
    taus.add(lower_expectation_inverse(d, b.society_bar))
    taus.add(lower_expectation_inverse(d, b.expost_bar))
    taus.add(nonsubmitter_threshold(cell))
    n = int(math.ceil((hi - lo) / cfg.tau_grid_step))
    taus.update(lo + i * cfg.tau_grid_step for i in range(n + 1))
    taus.add(hi)
    if isinstance(d, Discrete):
        atoms = [t for t, _ in d.atoms]
        taus.update(atoms)
        taus.update(
            a + 0.5 * (b_ - a) for a, b_ in zip(atoms, atoms[1:])
        )
        taus.add(atoms[0] - 1.0)

    best_tau = NEG_INF
    best_accept = False
    best_payoff = NEG_INF
    for tau in sorted(taus):
        for accept_pool in (False, True):
            if accept_pool:
                p = Policy(tau, True, NEG_INF)
            else:
                p = Policy(tau, False, max(tau, b.expost_bar))
            payoff = evaluate_policy(cell, p).college_payoff
            # ties break toward the larger pool (and toward accepting it), so
            # payoff plateaus report their most-pooled representative
            tie = 1e-10 * max(1.0, abs(payoff))
            if payoff > best_payoff + tie:
                best_tau, best_accept, best_payoff = tau, accept_pool, payoff
            elif payoff > best_payoff - tie:
                best_tau, best_accept = tau, accept_pool
                best_payoff = max(best_payoff, payoff)
    return best_tau, best_accept, best_payoff


def _bisect_root(g, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Root of an increasing function by bisection; clamps if no sign change."""
    glo, ghi = g(lo), g(hi)
    if glo >= 0.0:
        return lo
    if ghi <= 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def brute_force_aa(s: AAScenario, cfg: OracleConfig) -> dict:
    """Numerically reconstructed losses for all four regime pairs.

    Joint (group, score) masses are enumerated, cutoffs are bisected from the
    relevant expected utilities, and every loss is a quadrature between
    cutoffs; no closed-form loss expression is used.
    """
    q, p_r, p_g = s.q, s.p_r, s.p_g
    beta, c, delta, f = s.beta, s.c, s.delta, s.f
    lo, hi = s.x1_lo, s.x1_hi
    joint = {
        ("g", 1): q * p_g,
        ("g", 0): q * (1.0 - p_g),
        ("r", 1): (1.0 - q) * p_r,
        ("r", 0): (1.0 - q) * (1.0 - p_r),
    }
    prob_t = {t: joint[("g", t)] + joint[("r", t)] for t in (0, 1)}
    post_g = {t: joint[("g", t)] / prob_t[t] for t in (0, 1)}
    et = prob_t[1]

    def eu_college(x1: float, mean_t: float, prob_green: float) -> float:
        return x1 + mean_t + beta * prob_green - c

    results = {}
    for aa in (ALLOWED, BANNED):
        # the college's no-pressure benchmark conditions on the score and on
        # the group only when group-conscious admission is allowed
        if aa == ALLOWED:
            bench_key = lambda x0, t: (x0, t)
            bench_mean = lambda x0, t: (t, 1.0 if x0 == "g" else 0.0)
        else:
            bench_key = lambda x0, t: t
            bench_mean = lambda x0, t: (t, post_g[t])
        ideal = {}
        for (x0, t) in joint:
            mt, pg = bench_mean(x0, t)
            ideal[bench_key(x0, t)] = _bisect_root(
                lambda x1, mt=mt, pg=pg: eu_college(x1, mt, pg), lo, hi
            )

        for regime in (MANDATORY, BLIND):
            # college info sets: (members, conditional score mean, green
            # posterior, society's perceived score)
            if aa == ALLOWED and regime == MANDATORY:
                sets = [
                    ([(x0, t)], float(t), 1.0 if x0 == "g" else 0.0, float(t))
                    for (x0, t) in joint
                ]
            elif aa == ALLOWED and regime == BLIND:
                sets = [
                    (
                        [(x0, 0), (x0, 1)],
                        p_g if x0 == "g" else p_r,
                        1.0 if x0 == "g" else 0.0,
                        p_g if x0 == "g" else p_r,
                    )
                    for x0 in ("g", "r")
                ]
            elif aa == BANNED and regime == MANDATORY:
                sets = [
                    ([("g", t), ("r", t)], float(t), post_g[t], float(t))
                    for t in (0, 1)
                ]
            else:
                sets = [(list(joint), et, q, et)]

            alloc = 0.0
            social = 0.0
            society = 0.0
            for members, mean_t, prob_green, t_s in sets:
                chosen = _bisect_root(
                    lambda x1: eu_college(x1, mean_t, prob_green)
                    + delta * (x1 + t_s),
                    lo,
                    hi,
                )
                set_mass = sum(joint[m] for m in members)
                # social-pressure loss: disagreement band between the chosen
                # cutoff and society's perceived bar
                sb = -t_s
                a, b_ = min(chosen, sb), max(chosen, sb)
                social += (
                    delta
                    * set_mass
                    * f
                    * adaptive_simpson(
                        lambda x1: abs(x1 + t_s), a, b_, cfg.quadrature_tol
                    )
                )
                for (x0, t) in members:
                    mt, pg = bench_mean(x0, t)
                    i = ideal[bench_key(x0, t)]
                    ub = lambda x1, mt=mt, pg=pg: eu_college(x1, mt, pg)
                    alloc += (
                        joint[(x0, t)]
                        * f
                        * (
                            adaptive_simpson(ub, i, hi, cfg.quadrature_tol)
                            - adaptive_simpson(ub, chosen, hi, cfg.quadrature_tol)
                        )
                    )
                    # society's own loss, judged at true scores
                    a, b_ = min(chosen, -t), max(chosen, -t)
                    society += (
                        joint[(x0, t)]
                        * f
                        * adaptive_simpson(
                            lambda x1, t=t: abs(x1 + t), a, b_, cfg.quadrature_tol
                        )
                    )
            results[(aa, regime)] = {
                "allocative": alloc,
                "social": social,
                "society": society,
            }
    return results


def mc_crosscheck(
    cell: ObservableCell, p: Policy, cfg: OracleConfig
) -> tuple[RegimeOutcome, dict]:
    """Monte Carlo estimate of evaluate_policy plus standard errors."""
    rng = np.random.default_rng(cfg.seed)
    t = cell.dist.sample(rng, cfg.mc_samples)
    uc = cell.college.v + cell.college.w * t
    us = cell.society.v + cell.society.w * t
    pool = t <= p.imputation
    a_eff = max(p.imputation, p.accept_strictly_above)
    accepted = np.where(pool, p.accept_nonsubmitters, t > a_eff)

    se_pool = 0.0
    if pool.any():
        pooled_score = float(t[pool].mean())
        us_pool = cell.society.v + cell.society.w * pooled_score
        d_pool = max(-us_pool, 0.0) if p.accept_nonsubmitters else max(us_pool, 0.0)
        if d_pool > 0.0:
            # the pooled disagreement is a function of the estimated pooled
            # mean, so its sampling error must be propagated explicitly: the
            # per-sample spread of d_i cannot see it
            n_pool = int(pool.sum())
            se_pool = (
                float(pool.mean())
                * cell.society.w
                * float(t[pool].std())
                / math.sqrt(n_pool)
            )
    else:
        d_pool = 0.0
    d_sep = np.where(accepted, np.maximum(-us, 0.0), np.maximum(us, 0.0))
    d_i = np.where(pool, d_pool, d_sep)
    under_i = np.where(accepted, uc, 0.0)
    soc_i = np.where(accepted, us, 0.0)
    admit_i = accepted.astype(float)

    n = cfg.mc_samples
    outcome = RegimeOutcome(
        expected_underlying=float(under_i.mean()),
        expected_disagreement=float(d_i.mean()),
        college_payoff=float(under_i.mean() - cell.delta * d_i.mean()),
        society_payoff=float(soc_i.mean()),
        admit_measure=float(admit_i.mean()),
        admitted_sets=(),
    )
    se = {
        "expected_underlying": float(under_i.std() / math.sqrt(n)),
        "expected_disagreement": float(
            math.hypot(d_i.std() / math.sqrt(n), se_pool)
        ),
        "society_payoff": float(soc_i.std() / math.sqrt(n)),
        "admit_measure": float(admit_i.std() / math.sqrt(n)),
    }
    return outcome, se
