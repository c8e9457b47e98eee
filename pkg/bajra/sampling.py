"""Random valid families for sweeps and property tests.

All draws come from a numpy Generator; with no explicit seed the one from
settings is used so sweeps are reproducible.
"""
from __future__ import annotations

import numpy as np

import settings
from bajra.exceptions import DomainEmpty
from bajra.functions import Interval, GammaSolution
from bajra.specfile import FamilySpec, SplitSpec

GAMMA_VALUES = (-2.0, -1.0, -0.25, 0.0, 0.25, 1.0, 2.0)
POSITIVITY_MARGIN = 0.1
MIN_WRONSKIAN = 0.2
MAX_ATTEMPTS = 500


def make_rng(seed: int | None = None) -> np.random.Generator:
    return np.random.default_rng(settings.SEED if seed is None else seed)


def _positive_pair(rng: np.random.Generator, gamma: float, domain: Interval) -> tuple[float, float]:
    """(c, d) with c S + d C >= POSITIVITY_MARGIN on the domain."""
    points = domain.chebyshev_points(65)
    for _ in range(MAX_ATTEMPTS):
        c, d = rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0)
        values = GammaSolution(gamma, c, d, domain)(points)
        if values.min() >= POSITIVITY_MARGIN:
            return float(c), float(d)
    raise DomainEmpty(f"no positive solution found for gamma={gamma} on ({domain.lo}, {domain.hi})")


def _partner(rng: np.random.Generator, c: float, d: float) -> tuple[float, float]:
    """(a, b) with |a d - b c| >= MIN_WRONSKIAN."""
    while True:
        a, b = rng.uniform(-2.0, 2.0, size=2)
        if abs(a * d - b * c) >= MIN_WRONSKIAN:
            return float(a), float(b)


def random_coefficients(rng: np.random.Generator, gamma: float, domain: Interval) -> list[float]:
    c, d = _positive_pair(rng, gamma, domain)
    a, b = _partner(rng, c, d)
    return [a, b, c, d]


def random_split(rng: np.random.Generator, nonconstant: bool = True) -> SplitSpec:
    kinds = ["exp", "quadratic"] if nonconstant else ["constant", "exp", "quadratic"]
    kind = kinds[rng.integers(len(kinds))]
    if kind == "constant":
        return SplitSpec(kind, [float(rng.uniform(0.5, 2.0))])
    if kind == "exp":
        return SplitSpec(kind, [float(rng.uniform(-1.0, 1.0))])
    # 1 + mu x^2 stays positive on (-1, 1) for mu > -1
    return SplitSpec(kind, [float(rng.uniform(-0.5, 1.0))])


def random_family_spec(rng: np.random.Generator, gamma: float, domain: Interval = Interval(-1.0, 1.0),
                       grid: int = 33, nonconstant: bool = True) -> FamilySpec:
    return FamilySpec(
        gamma=float(gamma),
        f_coeffs=random_coefficients(rng, gamma, domain),
        g_coeffs=random_coefficients(rng, gamma, domain),
        domain=domain.to_list(),
        split1=random_split(rng, nonconstant),
        split2=random_split(rng, nonconstant),
        grid=grid,
    )


def random_uvwz_samples(rng: np.random.Generator, domain: Interval, n: int) -> tuple[np.ndarray, ...]:
    """(x, y, t, s) with x, y inside the domain and t, s in (0.1, 10)."""
    inset = 1e-3 * domain.width
    x, y = rng.uniform(domain.lo + inset, domain.hi - inset, size=(2, n))
    t, s = rng.uniform(0.1, 10.0, size=(2, n))
    return x, y, t, s
