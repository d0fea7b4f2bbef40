import numpy as np
import pytest

from testopt import (
    AAScenario,
    Discrete,
    ObservableCell,
    PartyUtility,
    Uniform,
)


def random_uniform_cell(rng: np.random.Generator, label: str = "u") -> ObservableCell:
    lo = rng.uniform(-20.0, 20.0)
    width = rng.uniform(5.0, 30.0)
    hi = lo + width
    delta = float(10.0 ** rng.uniform(-1.0, 1.0))  # [0.1, 10]
    wc = rng.uniform(0.5, 2.0)
    ws = rng.uniform(0.5, 2.0)
    cb = rng.uniform(lo - 0.2 * width, hi + 0.2 * width)
    sb = rng.uniform(lo - 0.2 * width, hi + 0.2 * width)
    return ObservableCell(
        college=PartyUtility(-cb * wc, wc),
        society=PartyUtility(-sb * ws, ws),
        delta=delta,
        dist=Uniform(lo, hi),
        label=label,
    )


def random_discrete_cell(rng: np.random.Generator, label: str = "d") -> ObservableCell:
    n = int(rng.integers(2, 9))
    gaps = rng.uniform(0.5, 3.0, size=n - 1)
    start = rng.uniform(-10.0, 10.0)
    scores = start + np.concatenate([[0.0], np.cumsum(gaps)])
    probs = rng.uniform(0.05, 1.0, size=n)
    probs = probs / probs.sum()
    # keep the exact-sum invariant satisfied after rounding
    probs[-1] = 1.0 - probs[:-1].sum()
    atoms = tuple((float(s), float(p)) for s, p in zip(scores, probs))
    lo, hi = scores[0], scores[-1]
    width = hi - lo
    delta = float(10.0 ** rng.uniform(-1.0, 1.0))
    wc = rng.uniform(0.5, 2.0)
    ws = rng.uniform(0.5, 2.0)
    cb = rng.uniform(lo - 0.2 * width, hi + 0.2 * width)
    sb = rng.uniform(lo - 0.2 * width, hi + 0.2 * width)
    return ObservableCell(
        college=PartyUtility(-cb * wc, wc),
        society=PartyUtility(-sb * ws, ws),
        delta=delta,
        dist=Discrete(atoms),
        label=label,
    )


def random_cell(rng: np.random.Generator) -> ObservableCell:
    if rng.random() < 0.5:
        return random_uniform_cell(rng)
    return random_discrete_cell(rng)


def random_aa_scenario(rng: np.random.Generator) -> AAScenario:
    while True:
        q = rng.uniform(0.1, 0.9)
        p_r = rng.uniform(0.1, 0.9)
        p_g = rng.uniform(0.1, 0.9)
        c = rng.uniform(0.1, 1.0)
        beta = c + rng.uniform(0.1, 1.5)
        delta = rng.uniform(0.1, 3.0)
        p_g0 = q / (q + (1 - q) * (1 - p_r) / (1 - p_g))
        p_g1 = q / (q + (1 - q) * p_r / p_g)
        if beta * (p_g0 - p_g1) >= 1.0:
            continue
        x1_lo = c - beta - 1.0 - rng.uniform(0.5, 3.0)
        x1_hi = c + rng.uniform(0.5, 3.0)
        return AAScenario(q, p_r, p_g, beta, c, delta, x1_lo, x1_hi)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
