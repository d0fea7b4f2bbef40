import math

import numpy as np

from testopt import (
    NEG_INF,
    POS_INF,
    AAScenario,
    Discrete,
    ObservableCell,
    OracleConfig,
    PartyUtility,
    Policy,
    Uniform,
    brute_force_aa,
    brute_force_flexible,
    evaluate_policy,
    mc_crosscheck,
    solve_mandatory,
)
from testopt.affirmative import ALLOWED, BANNED, BLIND, MANDATORY
from conftest import random_aa_scenario


def make_cell(vc, vs, delta=1.0, dist=None):
    return ObservableCell(
        PartyUtility(vc, 1.0), PartyUtility(vs, 1.0), delta, dist or Uniform(0, 100), "x"
    )


def test_determinism():
    cell = make_cell(-70.0, -30.0)
    cfg = OracleConfig(tau_grid_step=0.05, seed=7, mc_samples=10_000)
    assert brute_force_flexible(cell, cfg) == brute_force_flexible(cell, cfg)
    p = Policy(NEG_INF, False, 50.0)
    assert mc_crosscheck(cell, p, cfg) == mc_crosscheck(cell, p, cfg)


def test_brute_force_flexible_landmarks():
    cfg = OracleConfig(tau_grid_step=0.01)
    tau, accept, payoff = brute_force_flexible(make_cell(-70.0, -30.0), cfg)
    assert abs(tau - 60.0) <= 0.01
    assert not accept

    cell = make_cell(-40.0, -40.0)
    _, _, payoff = brute_force_flexible(cell, cfg)
    assert abs(payoff - solve_mandatory(cell)[1].college_payoff) <= 1e-9

    # a college that wants everyone hides all scores and accepts
    tau, accept, _ = brute_force_flexible(make_cell(10.0, -40.0), cfg)
    assert tau == POS_INF and accept


def test_brute_force_aa_posterior_collapse(rng):
    # equal score rates: the ban changes nothing relative to using the
    # population share as the bonus weight
    s = AAScenario(q=0.4, p_r=0.6, p_g=0.6, beta=1.2, c=0.5, delta=1.0,
                   x1_lo=-4.0, x1_hi=2.0)
    o = brute_force_aa(s, OracleConfig())
    for reg in (MANDATORY, BLIND):
        alloc, social = s.college_losses(BANNED, reg)
        assert abs(o[(BANNED, reg)]["allocative"] - alloc) <= 1e-10
        assert abs(o[(BANNED, reg)]["social"] - social) <= 1e-10
    # and mandatory losses use the q-weighted bonus in each group posterior
    p0, p1, gap = s.posterior_green()
    assert abs(gap) <= 1e-12 and abs(p0 - s.q) <= 1e-12


def test_brute_force_aa_pressure_limit():
    base = dict(q=0.5, p_r=0.7, p_g=0.3, beta=1.0, c=0.4, delta=200.0,
                x1_lo=-4.0, x1_hi=2.0)
    o = brute_force_aa(AAScenario(**base), OracleConfig())
    # cutoffs approach society's preferred ones, so pressure costs vanish
    assert o[(ALLOWED, MANDATORY)]["social"] <= 1e-3
    assert o[(BANNED, MANDATORY)]["social"] <= 1e-3


def test_mc_crosscheck_agrees():
    cfg = OracleConfig(mc_samples=400_000, seed=3)
    cell = make_cell(10.0, -40.0)
    cases = [
        (Policy(NEG_INF, False, NEG_INF), 8.0),
        (Policy(POS_INF, False, POS_INF), 10.0),
    ]
    for p, want in cases:
        out, se = mc_crosscheck(cell, p, cfg)
        exact = evaluate_policy(cell, p)
        assert abs(out.expected_disagreement - want) <= 4.0 * max(
            se["expected_disagreement"], 1e-3
        )
        for field in ("expected_underlying", "society_payoff", "admit_measure"):
            assert abs(getattr(out, field) - getattr(exact, field)) <= 4.0 * max(
                se[field], 1e-3
            )


def test_mc_point_mass_exact():
    cell = make_cell(-60.0, -40.0, dist=Discrete(((55.0, 1.0),)))
    p = Policy(NEG_INF, False, 50.0)
    out, se = mc_crosscheck(cell, p, OracleConfig(mc_samples=1000, seed=0))
    exact = evaluate_policy(cell, p)
    assert out.expected_underlying == exact.expected_underlying
    assert out.expected_disagreement == exact.expected_disagreement
    assert all(v == 0.0 for v in se.values())
