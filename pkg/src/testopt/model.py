"""Model primitives: party utilities, admission bars, disagreement, policies.

A "cell" fixes one observable profile: both parties' affine utilities in the
test score, a pressure intensity delta, and the score law.  Acceptance rules
are represented as an imputation level plus a monotone threshold on submitted
scores; that shape is without loss for this model.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .distributions import NEG_INF, POS_INF, ScoreDistribution


@dataclass(frozen=True)
class PartyUtility:
    """Affine utility u(t) = v + w t with w > 0."""

    v: float
    w: float

    def __post_init__(self) -> None:
        if not self.w > 0:
            raise ValueError(f"test-score weight must be positive, got w={self.w}")

    def __call__(self, t: float) -> float:
        return self.v + self.w * t

    def bar(self) -> float:
        """Score at which the utility crosses zero."""
        return -self.v / self.w


@dataclass(frozen=True)
class ObservableCell:
    college: PartyUtility
    society: PartyUtility
    delta: float
    dist: ScoreDistribution
    label: str = ""

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ValueError(f"pressure intensity must be nonnegative, got {self.delta}")
        if self.delta == 0:
            warnings.warn(
                "delta=0 is a degenerate diagnostic case (no social pressure)",
                stacklevel=3,
            )


@dataclass(frozen=True)
class Bars:
    college_bar: float
    society_bar: float
    expost_bar: float


def bars(cell: ObservableCell) -> Bars:
    cb = cell.college.bar()
    sb = cell.society.bar()
    eb = -(cell.college.v + cell.delta * cell.society.v) / (
        cell.college.w + cell.delta * cell.society.w
    )
    return Bars(college_bar=cb, society_bar=sb, expost_bar=eb)


def disagreement(cell: ObservableCell, t_s: float, accept: bool) -> float:
    """Society's benefit from overturning the decision at perceived score t_s."""
    if not math.isfinite(t_s):
        raise ValueError(f"perceived score must be finite, got {t_s}")
    u = cell.society(t_s)
    return max(-u, 0.0) if accept else max(u, 0.0)


def expost_utility(cell: ObservableCell, t: float) -> float:
    """Pressure-weighted blend of the two utilities; its sign governs admission."""
    return (cell.college(t) + cell.delta * cell.society(t)) / (1.0 + cell.delta)


@dataclass(frozen=True)
class Policy:
    """Imputation level plus a monotone acceptance threshold on submitted scores.

    Non-submitters (t <= imputation) all receive the same decision; submitted
    scores strictly above ``accept_strictly_above`` are accepted, the rest
    rejected.
    """

    imputation: float
    accept_nonsubmitters: bool
    accept_strictly_above: float

    def __post_init__(self) -> None:
        if self.accept_nonsubmitters:
            if self.accept_strictly_above > self.imputation:
                raise ValueError(
                    "accepting the pool while rejecting some submitters above it "
                    "is non-monotone"
                )
        else:
            if self.accept_strictly_above < self.imputation:
                raise ValueError(
                    "rejecting the pool while accepting submitters below it "
                    "is non-monotone"
                )


@dataclass(frozen=True)
class ScoreRegion:
    lo: float
    hi: float
    accepted: bool
    pooled: bool


@dataclass(frozen=True)
class RegimeOutcome:
    expected_underlying: float
    expected_disagreement: float
    college_payoff: float
    society_payoff: float
    admit_measure: float
    admitted_sets: tuple[ScoreRegion, ...] = field(default_factory=tuple)
