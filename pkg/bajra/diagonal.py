"""Closed-form partial derivatives of A_{f,p} on the diagonal, and a
finite-difference oracle to check them against.

Notation used throughout:

    P = p1 p2,  p0 = p1 + p2,  D = (p1 - p2)/p0,  K = P/p0^2,
    L = P'/P + f''/f'

D, K and L are carried as jets, so every derivative the formulas need is
exact up to rounding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from bajra import jets
from bajra.exceptions import OutOfDomain, StencilOutOfDomain
from bajra.functions import Interval, as_output, schwarzian, schwarzian_derivative
from bajra.means import BajraktarevicMean
from settings import logger

# partial orders (alpha, beta) checked for derivative orders 1..4
ORDER_PARTIALS = {1: (1, 0), 2: (1, 1), 3: (2, 1), 4: (2, 2)}
FD_STEPS = {1: 1e-4, 2: 1e-4, 3: 1e-3, 4: 4e-3}
ORDER_TOLERANCES = {1: 1e-7, 2: 1e-6, 3: 1e-5, 4: 5e-4}
STENCIL_MARGIN = 6

# second-order accurate central stencils: offsets and weights
CENTRAL_STENCILS = {
    0: (np.array([0.0]), np.array([1.0])),
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
}


@dataclass(frozen=True)
class DiagonalDerivatives:
    d1: float
    d2: float
    d12: float
    d112: float
    d1122: float
    at: float


@dataclass
class _Quantities:
    p1: np.ndarray
    p2: np.ndarray
    p0: np.ndarray
    P: np.ndarray
    D: np.ndarray
    K: np.ndarray
    L: np.ndarray
    f_jet: np.ndarray


def _quantities(m: BajraktarevicMean, x, f_order: int = 3) -> _Quantities:
    m.domain.require(x)
    a, b = m.p.jets(x, 2)
    p0 = m.p.p0(x)
    P = m.p.product(x)
    D = jets.quotient(a - b, p0)
    K = jets.quotient(P, jets.power(p0, 2))
    f_jet = m.f.jet(x, f_order)
    log_P = jets.quotient(jets.shift(P), jets.truncate(P, 1))
    log_slope = jets.quotient(f_jet[2:4], f_jet[1:3])
    return _Quantities(a[0], b[0], p0[0], P, D, K, log_P + log_slope, f_jet)


def formula_first(m: BajraktarevicMean, i: int, x):
    """d_i A on the diagonal: p_i/p0."""
    if i not in (1, 2):
        raise ValueError(f"variable index must be 1 or 2, got {i}")
    m.domain.require(x)
    p1, p2 = m.p.p1(x), m.p.p2(x)
    return (p1 if i == 1 else p2) / (p1 + p2)


def formula_mixed2(m: BajraktarevicMean, x):
    """d1 d2 A on the diagonal: -K L."""
    q = _quantities(m, x)
    return as_output(-q.K[0] * q.L[0], x)


def formula_mixed3(m: BajraktarevicMean, x):
    """d1^2 d2 A on the diagonal, term by term."""
    q = _quantities(m, x)
    D, K, L = q.D, q.K, q.L
    S = np.asarray(schwarzian(m.f, x))
    value = (-0.25 * D[2]
             - 3 * q.p0 * (q.p1 - q.p2) / (16 * q.P[0]) * D[1] ** 2
             - 0.5 * (K[1] * L[0] + K[0] * L[1])
             + 0.75 * K[0] * D[0] * L[0] ** 2
             - 0.5 * K[0] * D[0] * S)
    return as_output(value, x)


def formula_mixed4(m: BajraktarevicMean, x):
    """d1^2 d2^2 A on the diagonal, term by term."""
    q = _quantities(m, x)
    D, K, L = q.D, q.K, q.L
    S = np.asarray(schwarzian(m.f, x))
    dS = np.asarray(schwarzian_derivative(m.f, x))
    c = 6 - q.p0 ** 2 / q.P[0]
    value = ((K[2] + 0.375 * c * D[1] ** 2) * L[0]
             - K[1] * L[1]
             - 0.5 * K[0] ** 2 * c * L[0] ** 3
             + K[0] ** 2 * c * L[0] * S
             - K[0] ** 2 * dS)
    return as_output(value, x)


def expanded_mixed3(m: BajraktarevicMean, x):
    """d1^2 d2 A written in raw weight derivatives, without S(f)."""
    m.domain.require(x)
    (p1, d_p1, dd_p1), (p2, d_p2, dd_p2) = m.p.jets(x, 2)
    f = m.f.jet(x, 3)
    p0 = p1 + p2
    d_P = d_p1 * p2 + p1 * d_p2
    phi = f[2] / f[1]
    value = ((2 * d_p1 * (d_P - d_p2 * p2) - dd_p1 * p2 * p0) / p0 ** 3
             - (2 * d_p1 * p2 + d_p2 * p1) * (p2 - p1) / p0 ** 3 * phi
             - p1 * p2 * (p2 - 2 * p1) / p0 ** 3 * phi ** 2
             - p1 ** 2 * p2 / p0 ** 3 * f[3] / f[1])
    return as_output(value, x)


def expanded_mixed4(m: BajraktarevicMean, x):
    """d1^2 d2^2 A written in raw weight derivatives, without S(f)."""
    m.domain.require(x)
    a, b = m.p.jets(x, 2)
    p1, d_p1 = a[0], a[1]
    p2, d_p2 = b[0], b[1]
    P, d_P, dd_P = jets.product(a, b)
    p0, d_p0, dd_p0 = a + b
    f = m.f.jet(x, 4)
    phi = f[2] / f[1]
    value = (2 * (dd_P * d_p0 * p0 - dd_p0 * d_P * p0 - 6 * d_p1 * d_p2 * d_P) / p0 ** 4
             + (dd_P * p0 ** 2 - 2 * dd_p0 * p0 * P + d_p1 * d_p2 * (2 * p0 ** 2 - 24 * P)
                + d_p1 ** 2 * p2 * (2 * p0 - 6 * p2) + d_p2 ** 2 * p1 * (2 * p0 - 6 * p1)) / p0 ** 4 * phi
             + (d_P * (4 * p0 ** 2 - 18 * P) - 2 * d_p0 * p0 * P) / p0 ** 4 * phi ** 2
             + P * (2 * p0 ** 2 - 15 * P) / p0 ** 4 * phi ** 3
             + (d_P * (6 * P - 2 * p0 ** 2) + 2 * d_p0 * p0 * P) / p0 ** 4 * f[3] / f[1]
             + P * (10 * P - p0 ** 2) / p0 ** 4 * f[2] * f[3] / f[1] ** 2
             - P ** 2 / p0 ** 4 * f[4] / f[1])
    return as_output(value, x)


def diagonal_derivatives(m: BajraktarevicMean, x: float) -> DiagonalDerivatives:
    return DiagonalDerivatives(
        d1=formula_first(m, 1, x),
        d2=formula_first(m, 2, x),
        d12=formula_mixed2(m, x),
        d112=formula_mixed3(m, x),
        d1122=formula_mixed4(m, x),
        at=float(x),
    )


def fd_partial(mean_eval: Callable, orders: tuple[int, int], x: float, h: float,
               domain: Interval | None = None) -> float:
    """Tensor-product central difference for d1^alpha d2^beta A at (x, x).

    Truncation error is O(h^2) times the (alpha+beta+2)-th partials of A.
    """
    alpha, beta = orders
    if alpha not in CENTRAL_STENCILS or beta not in CENTRAL_STENCILS:
        raise ValueError(f"partial orders must lie in 0..2, got {orders}")
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    off1, w1 = CENTRAL_STENCILS[alpha]
    off2, w2 = CENTRAL_STENCILS[beta]
    domain = domain or getattr(mean_eval, "domain", None)
    reach = h * max(np.abs(off1).max(), np.abs(off2).max())
    if domain is not None and not (domain.lo < x - reach and x + reach < domain.hi):
        raise StencilOutOfDomain(f"stencil of half-width {reach:g} at {x} leaves ({domain.lo}, {domain.hi})")
    X = x + h * off1[:, None] * np.ones_like(off2)[None, :]
    Y = x + h * np.ones_like(off1)[:, None] * off2[None, :]
    try:
        values = np.asarray(mean_eval(X, Y), dtype=float)
    except OutOfDomain as e:
        raise StencilOutOfDomain(str(e)) from e
    return float(w1 @ values @ w2) / h ** (alpha + beta)


@dataclass(frozen=True)
class OrderCheck:
    order: int
    closed_form: float
    oracle: float
    step: float
    tolerance: float

    @property
    def discrepancy(self) -> float:
        return abs(self.closed_form - self.oracle)

    @property
    def passed(self) -> bool:
        return bool(self.discrepancy <= self.tolerance)


@dataclass(frozen=True)
class FormulaComparison:
    at: float
    checks: list[OrderCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def worst(self, order: int) -> float:
        return next(c.discrepancy for c in self.checks if c.order == order)


def compare_formulas(m: BajraktarevicMean, x: float, steps: dict | None = None,
                     tolerances: dict | None = None) -> FormulaComparison:
    steps = {**FD_STEPS, **(steps or {})}
    tolerances = {**ORDER_TOLERANCES, **(tolerances or {})}
    closed = {
        1: formula_first(m, 1, x),
        2: formula_mixed2(m, x),
        3: formula_mixed3(m, x),
        4: formula_mixed4(m, x),
    }
    checks = [OrderCheck(order, float(closed[order]), fd_partial(m, ORDER_PARTIALS[order], x, steps[order]),
                         steps[order], tolerances[order])
              for order in sorted(ORDER_PARTIALS)]
    return FormulaComparison(float(x), checks)


@dataclass
class GridComparison:
    results: list[FormulaComparison] = field(default_factory=list)
    skipped: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    def max_discrepancy(self, order: int) -> float:
        return max((r.worst(order) for r in self.results), default=0.0)


def compare_on_grid(m: BajraktarevicMean, n: int = 17, steps: dict | None = None,
                    tolerances: dict | None = None) -> GridComparison:
    """compare_formulas at n interior diagonal points; points too close to an end are skipped."""
    h = max({**FD_STEPS, **(steps or {})}.values())
    margin = STENCIL_MARGIN * h
    report = GridComparison()
    for x in m.domain.interior_grid(n):
        if x - m.domain.lo < margin or m.domain.hi - x < margin:
            report.skipped.append(float(x))
            continue
        report.results.append(compare_formulas(m, float(x), steps, tolerances))
    if report.skipped:
        logger.warning(f"{len(report.skipped)} diagonal points within {margin:g} of an endpoint left untested")
    return report
