"""Two-variable generalized Bajraktarevic means

    A_{f,p}(x, y) = f^-1((p1(x) f(x) + p2(y) f(y)) / (p1(x) + p2(y)))

with evaluation by bracketed inversion, the strict-mean check and recovery
of the second weight from sampled mean values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from bajra.exceptions import (
    DegeneratePair,
    DenominatorUnderflow,
    InversionFailure,
    NotMonotone,
    NotPositive,
    OutOfDomain,
)
from bajra.functions import CHEBYSHEV_SAMPLES, C4Function, Interval
from bajra import jets
from settings import logger

INVERSION_BUDGET = 80
NEWTON_DERIVATIVE_FLOOR = 1e-14
INVERSION_RESIDUAL = 1e-13
PAIR_SEPARATION = 1e-7
RECOVERY_DENOMINATOR_FLOOR = 1e-13

MeanFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def require_positive_function(p: C4Function, domain: Interval, what: str):
    values = np.asarray(p(domain.chebyshev_points(CHEBYSHEV_SAMPLES)))
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise NotPositive(f"{what} = {p.name} is not positive on ({domain.lo:g}, {domain.hi:g}); "
                          f"min sampled value {np.nanmin(values):.3g}")


@dataclass(frozen=True)
class WeightPair:
    p1: C4Function
    p2: C4Function
    domain: Interval

    def __post_init__(self):
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not p.domain.covers(self.domain):
                raise OutOfDomain(f"{name} is not defined on the whole weight domain")
            require_positive_function(p, self.domain, name)

    def jets(self, x, order: int = 2) -> tuple[np.ndarray, np.ndarray]:
        return self.p1.jet(x, order), self.p2.jet(x, order)

    def p0(self, x, order: int = 2) -> np.ndarray:
        """Jet of p1 + p2."""
        a, b = self.jets(x, order)
        return a + b

    def product(self, x, order: int = 2) -> np.ndarray:
        """Jet of p1 p2."""
        a, b = self.jets(x, order)
        return jets.product(a, b)

    def swapped(self) -> "WeightPair":
        return WeightPair(self.p2, self.p1, self.domain)

    def scaled(self, factor: float) -> "WeightPair":
        return WeightPair(factor * self.p1, factor * self.p2, self.domain)


@dataclass(frozen=True)
class BajraktarevicMean:
    f: C4Function
    p: WeightPair
    orientation: float = field(init=False)

    def __post_init__(self):
        domain = self.p.domain
        if not self.f.domain.covers(domain):
            raise OutOfDomain(f"generator {self.f.name} is not defined on the weight domain")
        slopes = np.asarray(self.f.eval(1, domain.chebyshev_points(CHEBYSHEV_SAMPLES)))
        if np.all(slopes > 0):
            orientation = 1.0
        elif np.all(slopes < 0):
            orientation = -1.0
        else:
            raise NotMonotone(f"{self.f.name}' changes sign or vanishes on ({domain.lo:g}, {domain.hi:g})")
        object.__setattr__(self, "orientation", orientation)

    @property
    def domain(self) -> Interval:
        return self.p.domain

    def weighted_value(self, x, y):
        """t = (p1(x) f(x) + p2(y) f(y)) / (p1(x) + p2(y))."""
        w1, w2 = self.p.p1(x), self.p.p2(y)
        return (w1 * self.f(x) + w2 * self.f(y)) / (w1 + w2)

    def __call__(self, x, y):
        return evaluate(self, x, y)

    def swapped(self) -> "BajraktarevicMean":
        return BajraktarevicMean(self.f, self.p.swapped())

    def with_generator(self, f: C4Function) -> "BajraktarevicMean":
        return BajraktarevicMean(f, self.p)

    def with_weights(self, p: WeightPair) -> "BajraktarevicMean":
        return BajraktarevicMean(self.f, p)


def invert_monotone(f: C4Function, target, lo, hi, orientation: float = 1.0, budget: int = INVERSION_BUDGET):
    """Solve f(x) = target on [lo, hi], pointwise over arrays.

    Safeguarded Newton: a Newton step that leaves the current bracket, or a
    slope below NEWTON_DERIVATIVE_FLOOR, is replaced by a bisection step.
    The caller guarantees that the bracket contains the root.
    """
    target, lo, hi = np.broadcast_arrays(np.asarray(target, dtype=float),
                                         np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    shape = target.shape
    target, lo, hi = (np.array(a, dtype=float).ravel() for a in (target, lo, hi))
    eps = np.finfo(float).eps
    x = 0.5 * (lo + hi)
    done = lo == hi

    for _ in range(budget):
        active = ~done
        if not active.any():
            break
        xa, ta, la, ha = x[active], target[active], lo[active], hi[active]
        h = orientation * (f.eval(0, xa) - ta)
        dh = orientation * f.eval(1, xa)

        # h increases in x, keep the root bracketed
        below = h < 0
        la = np.where(below, xa, la)
        ha = np.where(below, ha, xa)

        with np.errstate(divide="ignore", invalid="ignore"):
            step = h / dh
        newton = xa - step
        resolution = 2 * eps * np.maximum(1.0, np.abs(xa))
        settled = (h == 0) | (np.abs(step) <= resolution) | (ha - la <= 2 * resolution)
        bisect = (~np.isfinite(newton)) | (newton <= la) | (newton >= ha) | (np.abs(dh) < NEWTON_DERIVATIVE_FLOOR)
        x_next = np.where(bisect, 0.5 * (la + ha), newton)
        x_next = np.where(settled, xa, x_next)

        x[active], lo[active], hi[active] = x_next, la, ha
        done[active] = settled

    if not done.all():
        pending = ~done
        residual = np.abs(np.asarray(f.eval(0, x[pending])) - target[pending])
        failed = residual > INVERSION_RESIDUAL * (1 + np.abs(target[pending]))
        if failed.any():
            raise InversionFailure(f"inversion of {f.name} did not converge in {budget} steps at "
                                   f"{failed.sum()} points (worst residual {residual.max():.3g})")
    return x.reshape(shape)


def evaluate(m: BajraktarevicMean, x, y):
    """A_{f,p}(x, y), inverting f on the certified bracket [min(x,y), max(x,y)]."""
    xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    m.domain.require(xs, "x")
    m.domain.require(ys, "y")
    t = np.asarray(m.weighted_value(xs, ys))
    result = invert_monotone(m.f, t, np.minimum(xs, ys), np.maximum(xs, ys), m.orientation)
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(result)
    return result


@dataclass(frozen=True)
class StrictMeanReport:
    worst_margin: float
    diagonal_defect: float
    violations: int
    points: int

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.worst_margin > 0


def strict_mean_check(m: MeanFunction, grid, diagonal_tolerance: float = 1e-12) -> StrictMeanReport:
    """Worst margin min(A - min(x,y), max(x,y) - A) off the diagonal and max |A(x,x) - x| on it."""
    grid = np.asarray(grid, dtype=float).reshape(-1, 2)
    x, y = grid[:, 0], grid[:, 1]
    values = np.asarray(m(x, y), dtype=float)
    off = x != y
    margins = np.minimum(values - np.minimum(x, y), np.maximum(x, y) - values)[off]
    defects = np.abs(values - x)[~off]
    worst = float(margins.min()) if margins.size else np.inf
    defect = float(defects.max()) if defects.size else 0.0
    violations = int(np.sum(margins <= 0) + np.sum(defects > diagonal_tolerance))
    if violations:
        logger.warning(f"strict mean check: {violations} violations, worst margin {worst:.3g}")
    return StrictMeanReport(worst, defect, violations, len(grid))


def recover_weight(mean_values: MeanFunction, f: C4Function, p1_at: float, x: float, y: float) -> float:
    """p2(y) = p1(x) (f(M) - f(x)) / (f(y) - f(M)) with M = M(x, y)."""
    if abs(x - y) < PAIR_SEPARATION * (1 + abs(x)):
        raise DegeneratePair(f"x={x} and y={y} are too close to recover a weight")
    fm = f(float(mean_values(x, y)))
    denominator = f(y) - fm
    if abs(denominator) < RECOVERY_DENOMINATOR_FLOOR:
        raise DenominatorUnderflow(f"f(y) - f(M) = {denominator:.3g} at (x, y) = ({x}, {y})")
    return p1_at * (fm - f(x)) / denominator
