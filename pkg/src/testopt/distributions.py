"""Score distributions and conditional-expectation machinery.

Three score laws are supported: uniform, finite discrete, and piecewise-linear
density.  Every payoff integral in the solvers reduces to partial expectations
of affine functions over half-open intervals ``(lo, hi]``, so that operation is
the workhorse here.  The "lower expectation" ``L(c) = E[t | t <= c]`` is the
pooled score of non-submitters and drives all the cutoff logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

NEG_INF = float("-inf")
POS_INF = float("inf")

# Integrands are (piecewise affine) x (piecewise linear density), so Simpson is
# near-exact per smooth piece; the tolerance only matters around kinks.
QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 40

BISECT_TOL = 1e-10


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """Adaptive Simpson quadrature of f over [a, b] to absolute tolerance."""
    if b <= a:
        return 0.0

    def simpson(lo: float, hi: float, flo: float, fmid: float, fhi: float) -> float:
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def recurse(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = f(lm)
        frm = f(rm)
        left = simpson(lo, mid, flo, flm, fmid)
        right = simpson(mid, hi, fmid, frm, fhi)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        half = 0.5 * eps
        return recurse(lo, mid, flo, flm, fmid, left, half, depth + 1) + recurse(
            mid, hi, fmid, frm, fhi, right, half, depth + 1
        )

    mid = 0.5 * (a + b)
    fa, fm, fb = f(a), f(mid), f(b)
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def sup_level_crossing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    target: float,
    tol: float = BISECT_TOL,
) -> float:
    """Supremum of {x in [lo, hi] : f(x) <= target} for weakly increasing f.

    Requires f(lo) <= target.  Coincides with the rightmost root of
    f(x) = target when f is continuous and a root exists.
    """
    if f(hi) <= target:
        return hi
    a, b = lo, hi
    while b - a > tol:
        m = 0.5 * (a + b)
        if f(m) <= target:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"uniform support needs lo < hi, got [{self.lo}, {self.hi}]")

    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def upper_mass(self, cutoff: float) -> float:
        """Pr[t > cutoff] (strict)."""
        if cutoff <= self.lo:
            return 1.0
        if cutoff >= self.hi:
            return 0.0
        return (self.hi - cutoff) / (self.hi - self.lo)

    def lower_expectation(self, cutoff: float) -> float:
        """E[t | t <= cutoff], with the support infimum below the support."""
        if cutoff <= self.lo:
            return self.lo
        if cutoff >= self.hi:
            return self.mean()
        return 0.5 * (self.lo + cutoff)

    def partial_expectation(self, lo: float, hi: float, a: float, b: float) -> float:
        """E[(a + b t) 1{lo < t <= hi}]."""
        if lo > hi:
            raise ValueError(f"empty-interval bounds out of order: lo={lo} > hi={hi}")
        l = max(lo, self.lo)
        h = min(hi, self.hi)
        if h <= l:
            return 0.0
        dens = 1.0 / (self.hi - self.lo)
        return dens * (a * (h - l) + 0.5 * b * (h * h - l * l))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=n)


@dataclass(frozen=True)
class Discrete:
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("discrete distribution needs at least one atom")
        object.__setattr__(self, "atoms", tuple((float(t), float(p)) for t, p in self.atoms))
        scores = [t for t, _ in self.atoms]
        probs = [p for _, p in self.atoms]
        if any(p <= 0 for p in probs):
            raise ValueError("atom probabilities must be positive")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"atom probabilities sum to {sum(probs)}, not 1")
        if any(s1 >= s2 for s1, s2 in zip(scores, scores[1:])):
            raise ValueError("atom scores must be strictly increasing")

    def support(self) -> tuple[float, float]:
        return (self.atoms[0][0], self.atoms[-1][0])

    def mean(self) -> float:
        return sum(p * t for t, p in self.atoms)

    def upper_mass(self, cutoff: float) -> float:
        return sum(p for t, p in self.atoms if t > cutoff)

    def lower_expectation(self, cutoff: float) -> float:
        mass = 0.0
        total = 0.0
        for t, p in self.atoms:
            if t <= cutoff:
                mass += p
                total += p * t
        if mass == 0.0:
            return self.atoms[0][0]
        return total / mass

    def partial_expectation(self, lo: float, hi: float, a: float, b: float) -> float:
        if lo > hi:
            raise ValueError(f"empty-interval bounds out of order: lo={lo} > hi={hi}")
        return sum(p * (a + b * t) for t, p in self.atoms if lo < t <= hi)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        scores = np.array([t for t, _ in self.atoms])
        probs = np.array([p for _, p in self.atoms])
        return rng.choice(scores, size=n, p=probs / probs.sum())


@dataclass(frozen=True)
class PiecewiseDensity:
    """Density that linearly interpolates (score, density) knots, zero outside."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.knots) < 2:
            raise ValueError("piecewise density needs at least two knots")
        object.__setattr__(self, "knots", tuple((float(t), float(d)) for t, d in self.knots))
        scores = [t for t, _ in self.knots]
        dens = [d for _, d in self.knots]
        if any(s1 >= s2 for s1, s2 in zip(scores, scores[1:])):
            raise ValueError("knot scores must be strictly increasing")
        if any(d < 0 for d in dens):
            raise ValueError("densities must be nonnegative")
        total = sum(
            0.5 * (d0 + d1) * (t1 - t0)
            for (t0, d0), (t1, d1) in zip(self.knots, self.knots[1:])
        )
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"density integrates to {total}, not 1")

    def support(self) -> tuple[float, float]:
        return (self.knots[0][0], self.knots[-1][0])

    def density(self, t: float) -> float:
        lo, hi = self.support()
        if t < lo or t > hi:
            return 0.0
        xs = [k[0] for k in self.knots]
        ys = [k[1] for k in self.knots]
        return float(np.interp(t, xs, ys))

    def partial_expectation(self, lo: float, hi: float, a: float, b: float) -> float:
        if lo > hi:
            raise ValueError(f"empty-interval bounds out of order: lo={lo} > hi={hi}")
        total = 0.0
        for (t0, d0), (t1, d1) in zip(self.knots, self.knots[1:]):
            l = max(lo, t0)
            h = min(hi, t1)
            if h <= l:
                continue
            slope = (d1 - d0) / (t1 - t0)

            def integrand(t: float, t0=t0, d0=d0, slope=slope) -> float:
                return (a + b * t) * (d0 + slope * (t - t0))

            total += adaptive_simpson(integrand, l, h)
        return total

    def mean(self) -> float:
        return self.partial_expectation(NEG_INF, POS_INF, 0.0, 1.0)

    def upper_mass(self, cutoff: float) -> float:
        return self.partial_expectation(cutoff, POS_INF, 1.0, 0.0)

    def lower_expectation(self, cutoff: float) -> float:
        mass = 1.0 - self.upper_mass(cutoff)
        if mass <= 1e-14:
            return self.support()[0]
        return self.partial_expectation(NEG_INF, cutoff, 0.0, 1.0) / mass

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # inverse-CDF on a fine grid; plenty for Monte Carlo cross-checks
        lo, hi = self.support()
        grid = np.linspace(lo, hi, 4001)
        cdf = np.array([1.0 - self.upper_mass(x) for x in grid])
        cdf = np.clip(cdf, 0.0, 1.0)
        cdf[0], cdf[-1] = 0.0, 1.0
        u = rng.uniform(0.0, 1.0, size=n)
        return np.interp(u, cdf, grid)


ScoreDistribution = Union[Uniform, Discrete, PiecewiseDensity]


def lower_expectation_inverse(d: ScoreDistribution, target: float) -> float:
    """Cutoff at which L(.) = E[t | t <= .] crosses `target`.

    Returns -inf when L is everywhere above target, +inf when everywhere
    (weakly) below; on flat segments of a continuous L the supremum of the
    solution set is returned, and for discrete laws the smallest atom with
    L(atom) >= target.
    """
    lo, _hi = d.support()
    if target < lo:
        return NEG_INF
    if target >= d.mean():
        return POS_INF
    if isinstance(d, Uniform):
        return d.lo + 2.0 * (target - d.lo)
    if isinstance(d, Discrete):
        for t, _ in d.atoms:
            if d.lower_expectation(t) >= target - 1e-15:
                return t
        return POS_INF
    return sup_level_crossing(d.lower_expectation, lo, d.support()[1], target)


def mlrp_increasing(ds: Sequence[ScoreDistribution]) -> bool:
    """Whether each adjacent pair is ordered by the monotone likelihood ratio."""
    if len(ds) < 2:
        return True
    kinds = {type(d) for d in ds}
    if len(kinds) > 1:
        raise ValueError("MLRP check requires distributions of one variant")
    for d1, d2 in zip(ds, ds[1:]):
        if not _mlrp_pair(d1, d2):
            return False
    return True


def _mlrp_pair(d1: ScoreDistribution, d2: ScoreDistribution) -> bool:
    if isinstance(d1, Uniform):
        return d2.lo >= d1.lo and d2.hi >= d1.hi
    if isinstance(d1, Discrete):
        grid = sorted({t for t, _ in d1.atoms} | {t for t, _ in d2.atoms})
        f1 = {t: p for t, p in d1.atoms}
        f2 = {t: p for t, p in d2.atoms}
        vals1 = [f1.get(t, 0.0) for t in grid]
        vals2 = [f2.get(t, 0.0) for t in grid]
    else:
        grid = sorted({t for t, _ in d1.knots} | {t for t, _ in d2.knots})
        vals1 = [d1.density(t) for t in grid]
        vals2 = [d2.density(t) for t in grid]
    # f2/f1 weakly increasing  <=>  f2(t) f1(t') >= f2(t') f1(t) for t > t'
    n = len(grid)
    for j in range(n):
        for i in range(j + 1, n):
            if vals2[i] * vals1[j] < vals2[j] * vals1[i] - 1e-12:
                return False
    return True
