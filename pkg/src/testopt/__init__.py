"""Optimal admissions policies under social pressure.

A college privately values admits differently than the public does; the cost
of overruling public opinion depends on what the public can see.  This package
solves for the college's optimal admission and score-disclosure policy under
test-mandatory, test-optional, and test-blind regimes, classifies which
students gain or lose, and analyzes a two-group extension where a ban on
group-conscious admissions can push the college to stop looking at scores
altogether.
"""

from .distributions import (
    NEG_INF,
    POS_INF,
    Discrete,
    PiecewiseDensity,
    ScoreDistribution,
    Uniform,
    lower_expectation_inverse,
    mlrp_increasing,
)
from .model import (
    Bars,
    ObservableCell,
    PartyUtility,
    Policy,
    RegimeOutcome,
    bars,
    disagreement,
    expost_utility,
)
from .regimes import (
    FlexibleSolution,
    evaluate_policy,
    nonsubmitter_threshold,
    payoff_curve,
    solve_flexible,
    solve_mandatory,
    solve_restricted,
)
from .welfare import (
    ObservablePath,
    StudentFate,
    classify_degenerate_imputation,
    classify_flexible,
    classify_path,
    classify_policy,
    society_payoff,
)
from .affirmative import AAAnalysis, AAScenario, analyze
from .oracle import OracleConfig, brute_force_aa, brute_force_flexible, mc_crosscheck
from .scenario import (
    PreconditionError,
    Scenario,
    ScenarioError,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "NEG_INF",
    "POS_INF",
    "Uniform",
    "Discrete",
    "PiecewiseDensity",
    "ScoreDistribution",
    "lower_expectation_inverse",
    "mlrp_increasing",
    "PartyUtility",
    "ObservableCell",
    "Bars",
    "bars",
    "disagreement",
    "expost_utility",
    "Policy",
    "RegimeOutcome",
    "FlexibleSolution",
    "evaluate_policy",
    "solve_mandatory",
    "solve_flexible",
    "solve_restricted",
    "nonsubmitter_threshold",
    "payoff_curve",
    "StudentFate",
    "ObservablePath",
    "classify_flexible",
    "classify_policy",
    "classify_path",
    "classify_degenerate_imputation",
    "society_payoff",
    "AAScenario",
    "AAAnalysis",
    "analyze",
    "OracleConfig",
    "brute_force_flexible",
    "brute_force_aa",
    "mc_crosscheck",
    "PreconditionError",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
]
