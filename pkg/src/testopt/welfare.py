"""Who gains and who loses when the college stops requiring scores.

Fates compare a test-optional admission set against the mandatory benchmark,
per score interval.  The path analysis orders a family of cells by rising
observables and labels each cell Low / Medium / High according to where the
fixed imputation sits relative to the cell's blended bar.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import NEG_INF, POS_INF, mlrp_increasing
from .model import ObservableCell, Policy, bars
from .regimes import evaluate_policy, solve_flexible, solve_restricted

UNAFFECTED = "Unaffected"
STRICTLY_BENEFITS = "StrictlyBenefits"
STRICTLY_HARMED = "StrictlyHarmed"

REGION_LOW = "Low"
REGION_MEDIUM = "Medium"
REGION_HIGH = "High"

COLLAPSES_TO_BLIND = "CollapsesToBlind"
COLLAPSES_TO_MANDATORY = "CollapsesToMandatory"


@dataclass(frozen=True)
class StudentFate:
    cell_label: str
    lo: float
    hi: float  # the score interval (lo, hi]
    mandatory_admitted: bool
    optional_admitted: bool
    classification: str

    def __post_init__(self) -> None:
        expect = _classification(self.mandatory_admitted, self.optional_admitted)
        if self.classification != expect:
            raise ValueError(
                f"classification {self.classification} inconsistent with admission "
                f"flags ({self.mandatory_admitted}, {self.optional_admitted})"
            )


def _classification(mandatory: bool, optional: bool) -> str:
    if mandatory == optional:
        return UNAFFECTED
    return STRICTLY_BENEFITS if optional else STRICTLY_HARMED


def _admits(policy: Policy, t: float) -> bool:
    if t <= policy.imputation:
        return policy.accept_nonsubmitters
    return t > max(policy.imputation, policy.accept_strictly_above)


def classify_policy(cell: ObservableCell, policy: Policy) -> list[StudentFate]:
    """Partition the score line by fate under `policy` versus mandatory."""
    b = bars(cell)
    pts = sorted(
        {
            x
            for x in (
                b.expost_bar,
                policy.imputation,
                max(policy.imputation, policy.accept_strictly_above),
            )
            if NEG_INF < x < POS_INF
        }
    )
    edges = [NEG_INF] + pts + [POS_INF]
    fates = []
    for lo, hi in zip(edges, edges[1:]):
        if lo == NEG_INF:
            probe = hi - 1.0 if hi < POS_INF else 0.0
        elif hi == POS_INF:
            probe = lo + 1.0
        else:
            probe = 0.5 * (lo + hi)
        mand = probe > b.expost_bar
        opt = _admits(policy, probe)
        fates.append(
            StudentFate(cell.label, lo, hi, mand, opt, _classification(mand, opt))
        )
    return _merge_adjacent(fates)


def _merge_adjacent(fates: list[StudentFate]) -> list[StudentFate]:
    merged: list[StudentFate] = []
    for f in fates:
        if (
            merged
            and merged[-1].classification == f.classification
            and merged[-1].mandatory_admitted == f.mandatory_admitted
            and merged[-1].hi == f.lo
        ):
            last = merged.pop()
            f = StudentFate(
                f.cell_label,
                last.lo,
                f.hi,
                f.mandatory_admitted,
                f.optional_admitted,
                f.classification,
            )
        merged.append(f)
    return merged


def classify_flexible(cell: ObservableCell) -> list[StudentFate]:
    sol = solve_flexible(cell)
    return classify_policy(cell, sol.policy)


@dataclass(frozen=True)
class ObservablePath:
    cells: tuple[ObservableCell, ...]
    taus: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.taus):
            raise ValueError("one imputation level per cell required")
        if not self.cells:
            raise ValueError("path needs at least one cell")
        for c in self.cells:
            if c.college.w != 1.0 or c.society.w != 1.0:
                raise ValueError(
                    f"path cells need unit score weights, cell {c.label!r} has "
                    f"w^c={c.college.w}, w^s={c.society.w}"
                )
        for a, b in zip(self.cells, self.cells[1:]):
            if b.college.v < a.college.v or b.society.v < a.society.v:
                raise ValueError(
                    f"intercepts must rise along the path; {b.label!r} drops "
                    f"below {a.label!r}"
                )
        for a, b in zip(self.taus, self.taus[1:]):
            if b < a:
                raise ValueError("imputation levels must rise along the path")
        if not mlrp_increasing([c.dist for c in self.cells]):
            raise ValueError("score laws must rise in likelihood-ratio order")


def classify_path(
    path: ObservablePath,
) -> list[tuple[str, str, list[StudentFate]]]:
    out = []
    for cell, tau in zip(path.cells, path.taus):
        b = bars(cell)
        if tau <= b.expost_bar:
            region = REGION_LOW
        elif cell.dist.lower_expectation(tau) <= b.expost_bar:
            region = REGION_MEDIUM
        else:
            region = REGION_HIGH
        policy, _ = solve_restricted(cell, tau)
        out.append((cell.label, region, classify_policy(cell, policy)))
    return out


def society_payoff(cell: ObservableCell, p: Policy) -> float:
    """Society's expected utility over the accepted mass, at true scores."""
    return evaluate_policy(cell, p).society_payoff


def classify_degenerate_imputation(rule: str) -> str:
    """Unraveling verdicts for the two self-referential imputation rules.

    Imputing the average submitted score makes withholding safe for everyone
    below the average, which cascades until nobody submits; imputing the
    Bayesian non-submission posterior makes withholding informative, which
    cascades until everybody submits.
    """
    table = {
        "AverageSubmitted": COLLAPSES_TO_BLIND,
        "BayesianNonsubmission": COLLAPSES_TO_MANDATORY,
    }
    if rule not in table:
        raise ValueError(f"unknown imputation rule {rule!r}")
    return table[rule]
