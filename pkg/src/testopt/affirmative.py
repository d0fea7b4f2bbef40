"""Two-group extension with a binary test and a group admission bonus.

Students are green (share q) or red, score 1 with group-specific probability,
and carry a uniformly distributed baseline qualification x1.  The college
values green admits by a bonus beta against an admission cost c; society
values only x1 + t.  When group-conscious admissions are banned the college
back-doors the bonus through the score's group posterior, and may prefer to
go test blind.  All losses are exact quadratic forms in cutoff gaps.

The closed forms live in module-level functions taking plain parameters so
knife-edge configurations outside the validated scenario class can still be
probed; `AAScenario` methods wrap them with validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

ALLOWED = "Allowed"
BANNED = "Banned"
MANDATORY = "Mandatory"
BLIND = "Blind"


def posteriors(q: float, p_r: float, p_g: float) -> tuple[float, float, float]:
    """(P_g0, P_g1, Delta): green posterior after a low / high score, and gap."""
    p_g0 = q / (q + (1.0 - q) * (1.0 - p_r) / (1.0 - p_g))
    p_g1 = q / (q + (1.0 - q) * p_r / p_g)
    return p_g0, p_g1, p_g0 - p_g1


def expected_score(q: float, p_r: float, p_g: float) -> float:
    return q * p_g + (1.0 - q) * p_r


def college_loss_closed_form(
    q: float,
    p_r: float,
    p_g: float,
    beta: float,
    c: float,
    delta: float,
    f: float,
    aa: str,
    regime: str,
) -> tuple[float, float]:
    """(allocative, social) loss of the college relative to the best it could
    do with a test and no social pressure, under the given regime pair."""
    et = expected_score(q, p_r, p_g)
    p_g0, p_g1, _ = posteriors(q, p_r, p_g)
    one = 1.0 + delta

    if aa == ALLOWED:
        # per-group bonus net of cost; the cutoff gap from pressure is
        # h*delta/(1+delta) in both testing regimes
        groups = ((q, beta - c, p_g), (1.0 - q, -c, p_r))
        alloc = sum(w * (f / 2.0) * (h * delta / one) ** 2 for w, h, _ in groups)
        social = sum(w * (f / 2.0) * delta * h * h / one**2 for w, h, _ in groups)
        if regime == BLIND:
            # hiding the score adds its variance to the allocative gap
            alloc += sum(w * (f / 2.0) * p * (1.0 - p) for w, _, p in groups)
        return alloc, social

    if aa != BANNED:
        raise ValueError(f"unknown aa regime {aa!r}")
    scores = ((1.0 - et, p_g0, 0.0), (et, p_g1, 1.0))
    if regime == MANDATORY:
        alloc = sum(
            w * (f / 2.0) * (delta * (beta * pg - c) / one) ** 2
            for w, pg, _ in scores
        )
        social = sum(
            w * (f / 2.0) * delta * (beta * pg - c) ** 2 / one**2
            for w, pg, _ in scores
        )
        return alloc, social
    if regime != BLIND:
        raise ValueError(f"unknown testing regime {regime!r}")
    alloc = sum(
        w
        * (f / 2.0)
        * (t - et + beta * pg - q * beta / one - c * delta / one) ** 2
        for w, pg, t in scores
    )
    social = (f / 2.0) * delta * (beta * q - c) ** 2 / one**2
    return alloc, social


def blind_net_benefit_closed_form(
    q: float, p_r: float, p_g: float, beta: float, c: float, delta: float, f: float
) -> float:
    """College's payoff advantage of going blind when group-conscious
    admissions are banned; positive means blind is preferred."""
    et = expected_score(q, p_r, p_g)
    _, _, gap = posteriors(q, p_r, p_g)
    bd = beta * gap
    return (
        (f / 2.0)
        * et
        * (1.0 - et)
        / (1.0 + delta)
        * ((1.0 + delta) * (2.0 * bd - 1.0) - bd * bd)
    )


def society_loss_closed_form(
    q: float,
    p_r: float,
    p_g: float,
    beta: float,
    c: float,
    delta: float,
    f: float,
    aa: str,
    regime: str,
) -> float:
    """Society's loss relative to admitting exactly the x1 + t > 0 students."""
    et = expected_score(q, p_r, p_g)
    p_g0, p_g1, _ = posteriors(q, p_r, p_g)
    one = 1.0 + delta
    if aa == ALLOWED:
        if regime == MANDATORY:
            return (f / (2.0 * one**2)) * (c * c - 2.0 * c * q * beta + q * beta * beta)
        # cutoffs miss the score by its per-group variance plus the bonus gap
        groups = ((q, beta - c, p_g), (1.0 - q, -c, p_r))
        return sum(
            w * (f / 2.0) * (p * (1.0 - p) + (h / one) ** 2) for w, h, p in groups
        )
    if regime == MANDATORY:
        return (f / 2.0) * (
            (1.0 - et) * (beta * p_g0 - c) ** 2 + et * (beta * p_g1 - c) ** 2
        ) / one**2
    return (f / (2.0 * one**2)) * (
        (beta * q - c) ** 2 + et * (1.0 - et) * one**2
    )


@dataclass(frozen=True)
class AAScenario:
    q: float
    p_r: float
    p_g: float
    beta: float
    c: float
    delta: float
    x1_lo: float
    x1_hi: float

    def __post_init__(self) -> None:
        checks = [
            (0.0 < self.q < 1.0, f"q in (0,1) violated: q={self.q}"),
            (0.0 < self.p_r < 1.0, f"p_r in (0,1) violated: p_r={self.p_r}"),
            (0.0 < self.p_g < 1.0, f"p_g in (0,1) violated: p_g={self.p_g}"),
            (self.beta > self.c, f"beta > c violated: beta={self.beta}, c={self.c}"),
            (self.c > 0.0, f"c > 0 violated: c={self.c}"),
            (self.delta > 0.0, f"delta > 0 violated: delta={self.delta}"),
            (
                self.x1_lo < self.c - self.beta - 1.0,
                f"x1_lo < c - beta - 1 violated: x1_lo={self.x1_lo}, "
                f"bound={self.c - self.beta - 1.0}",
            ),
            (
                self.x1_hi > self.c,
                f"x1_hi > c violated: x1_hi={self.x1_hi}, c={self.c}",
            ),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)
        _, _, gap = posteriors(self.q, self.p_r, self.p_g)
        if self.beta * gap >= 1.0:
            raise ValueError(
                f"beta*Delta < 1 violated: beta*Delta={self.beta * gap}"
            )

    @property
    def f(self) -> float:
        return 1.0 / (self.x1_hi - self.x1_lo)

    @property
    def expected_score(self) -> float:
        return expected_score(self.q, self.p_r, self.p_g)

    def posterior_green(self) -> tuple[float, float, float]:
        return posteriors(self.q, self.p_r, self.p_g)

    def _params(self) -> tuple:
        return (self.q, self.p_r, self.p_g, self.beta, self.c, self.delta, self.f)

    def college_losses(self, aa: str, regime: str) -> tuple[float, float]:
        return college_loss_closed_form(*self._params(), aa, regime)

    def blind_net_benefit(self) -> float:
        return blind_net_benefit_closed_form(*self._params())

    def society_loss(self, aa: str, regime: str) -> float:
        return society_loss_closed_form(*self._params(), aa, regime)

    def thresholds(self) -> tuple[float, bool, float, float]:
        """(beta_star, delta_star_exists, delta_star, Delta_star).

        beta_star / Delta_star: bonus and posterior-gap levels at which the
        banned college flips to blind; delta_star: the pressure level doing
        the same at fixed bonus, +inf flagged nonexistent when the bonus is
        too weak to ever make blind attractive.
        """
        _, _, gap = posteriors(self.q, self.p_r, self.p_g)
        if gap <= 0.0:
            raise ValueError(
                f"Delta > 0 required for the flip thresholds, got Delta={gap}"
            )
        root = 1.0 + self.delta - math.sqrt(self.delta * (1.0 + self.delta))
        beta_star = root / gap
        delta_star_gap = root / self.beta
        bd = self.beta * gap
        if 0.5 < bd < 1.0:
            return beta_star, True, (1.0 - bd) ** 2 / (2.0 * bd - 1.0), delta_star_gap
        return beta_star, False, math.inf, delta_star_gap

    def college_pref_banned(self) -> str:
        return BLIND if self.blind_net_benefit() > 0.0 else MANDATORY

    def society_analysis(self) -> "SocietyAnalysis":
        loss_map = {
            (aa, regime): self.society_loss(aa, regime)
            for aa in (ALLOWED, BANNED)
            for regime in (MANDATORY, BLIND)
        }
        et = self.expected_score
        _, _, gap = posteriors(self.q, self.p_r, self.p_g)
        bd = self.beta * gap
        delta_lower = (
            bd * bd / (2.0 * bd - 1.0) - 1.0 if bd > 0.5 else math.inf
        )
        delta_prime = (
            self.beta * math.sqrt(self.q * (1.0 - self.q) / (et * (1.0 - et))) - 1.0
        )
        delta_bar = max(delta_lower, delta_prime)
        backfires = (
            self.college_pref_banned() == BLIND
            and loss_map[(BANNED, BLIND)] > loss_map[(ALLOWED, MANDATORY)]
        )
        return SocietyAnalysis(loss_map, delta_lower, delta_prime, delta_bar, backfires)


@dataclass(frozen=True)
class SocietyAnalysis:
    loss_map: dict
    delta_lower: float
    delta_prime: float
    delta_bar: float
    ban_backfires: bool


@dataclass(frozen=True)
class AAAnalysis:
    ET: float
    P_g0: float
    P_g1: float
    Delta: float
    loss_college: dict
    loss_society: dict
    college_pref_banned: str
    beta_star: float
    delta_star_exists: bool
    delta_star: float
    Delta_star: float
    delta_lower: float
    delta_prime: float
    delta_bar: float
    ban_backfires: bool


def analyze(s: AAScenario) -> AAAnalysis:
    p_g0, p_g1, gap = s.posterior_green()
    loss_college = {
        (aa, regime): s.college_losses(aa, regime)
        for aa in (ALLOWED, BANNED)
        for regime in (MANDATORY, BLIND)
    }
    soc = s.society_analysis()
    if gap > 0.0:
        beta_star, exists, delta_star, gap_star = s.thresholds()
    else:
        beta_star, exists, delta_star, gap_star = math.nan, False, math.inf, math.nan
    return AAAnalysis(
        ET=s.expected_score,
        P_g0=p_g0,
        P_g1=p_g1,
        Delta=gap,
        loss_college=loss_college,
        loss_society=soc.loss_map,
        college_pref_banned=s.college_pref_banned(),
        beta_star=beta_star,
        delta_star_exists=exists,
        delta_star=delta_star,
        Delta_star=gap_star,
        delta_lower=soc.delta_lower,
        delta_prime=soc.delta_prime,
        delta_bar=soc.delta_bar,
        ban_backfires=soc.ban_backfires,
    )
