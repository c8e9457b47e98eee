"""Four-times differentiable functions, the S_gamma/C_gamma fundamental system
of F'' = gamma*F, ratio functions u/v and the Schwarzian derivative.

All evaluators accept scalars or numpy arrays. Scalars in, floats out.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev, polynomial
from scipy.optimize import bisect

from bajra import jets
from bajra.exceptions import (
    AnchorNotPositive,
    IncompatibleSolutions,
    InvalidInterval,
    NotIndependent,
    NotPositive,
    OutOfDomain,
    VanishingDerivative,
)
from settings import logger

MAX_ORDER = 4

# |gamma * x^2| below this uses the truncated power series
SERIES_SWITCHOVER = 1e-4
SERIES_TERMS = 8
SINE_SERIES = np.array([1.0 / factorial(2 * k + 1) for k in range(SERIES_TERMS)])
COSINE_SERIES = np.array([1.0 / factorial(2 * k) for k in range(SERIES_TERMS)])

DERIVATIVE_FLOOR = 1e-14
WRONSKIAN_RELATIVE_FLOOR = 1e-12
ZERO_SCAN_POINTS = 256
ZERO_BISECTION_STEPS = 128
CHEBYSHEV_SAMPLES = 257


def as_output(values, like):
    """Collapse 0-d results back to a float when the input was a scalar."""
    if np.ndim(like) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise InvalidInterval(f"interval endpoints must be finite, got ({self.lo}, {self.hi})")
        if not self.lo < self.hi:
            raise InvalidInterval(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)

    def __contains__(self, x) -> bool:
        return bool(np.all(self.contains(x)))

    def require(self, x, what: str = "point"):
        if not np.all(self.contains(x)):
            bad = np.asarray(x, dtype=float)[~self.contains(x)].ravel()
            raise OutOfDomain(f"{what} {bad[:3].tolist()} outside open interval ({self.lo}, {self.hi})")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def covers(self, other: "Interval", slack: float = 1e-12) -> bool:
        return (self.lo <= other.lo + slack * (1 + abs(other.lo))
                and self.hi >= other.hi - slack * (1 + abs(other.hi)))

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            return Interval(lo, hi)
        return None

    def chebyshev_points(self, n: int = CHEBYSHEV_SAMPLES) -> np.ndarray:
        """First-kind Chebyshev points, all strictly inside the interval."""
        return self.midpoint + 0.5 * self.width * chebyshev.chebpts1(n)

    def interior_grid(self, n: int) -> np.ndarray:
        """n equispaced points with the endpoints excluded."""
        return np.linspace(self.lo, self.hi, n + 2)[1:-1]

    def to_list(self) -> list[float]:
        return [self.lo, self.hi]


JetFunction = Callable[[np.ndarray, int], np.ndarray]


class C4Function:
    """A real function on an open interval with derivatives of order 0..4.

    ``jet_fn(x, order)`` must return an array of shape ``(order + 1, *x.shape)``.
    """

    def __init__(self, jet_fn: JetFunction, domain: Interval, name: str = "f"):
        self._jet_fn = jet_fn
        self.domain = domain
        self.name = name

    def __repr__(self):
        return f"C4Function({self.name} on ({self.domain.lo:g}, {self.domain.hi:g}))"

    def jet(self, x, order: int = MAX_ORDER) -> np.ndarray:
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"derivative order must lie in 0..{MAX_ORDER}, got {order}")
        return self._jet_fn(np.asarray(x, dtype=float), order)

    def eval(self, order: int, x):
        return as_output(self.jet(x, order)[order], x)

    def __call__(self, x):
        return self.eval(0, x)

    def restrict(self, domain: Interval) -> "C4Function":
        if not self.domain.covers(domain):
            raise OutOfDomain(f"cannot restrict {self.name} to ({domain.lo}, {domain.hi})")
        return C4Function(self._jet_fn, domain, self.name)

    def _combine(self, other, rule, symbol: str) -> "C4Function":
        if isinstance(other, C4Function):
            domain = self.domain.intersect(other.domain)
            if domain is None:
                raise OutOfDomain(f"{self.name} and {other.name} have disjoint domains")
            jet_fn = lambda x, order: rule(self.jet(x, order), other.jet(x, order))
            return C4Function(jet_fn, domain, f"({self.name}{symbol}{other.name})")
        value = float(other)
        jet_fn = lambda x, order: rule(self.jet(x, order), jets.constant(value, order, x.shape))
        return C4Function(jet_fn, self.domain, f"({self.name}{symbol}{value:g})")

    def __mul__(self, other):
        return self._combine(other, jets.product, "*")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(other, jets.quotient, "/")

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, "+")

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, "-")

    def __neg__(self):
        return self.affine(-1.0, 0.0)

    def affine(self, alpha: float, beta: float) -> "C4Function":
        jet_fn = lambda x, order: jets.affine(self.jet(x, order), alpha, beta)
        return C4Function(jet_fn, self.domain, f"({alpha:g}*{self.name}+{beta:g})")


def from_derivatives(derivatives: Sequence[Callable], domain: Interval, name: str) -> C4Function:
    """Build a C4Function from closed forms of f, f', f'', f''', f''''.

    Entries may be callables or plain numbers for constant derivatives.
    """
    if len(derivatives) != MAX_ORDER + 1:
        raise ValueError(f"expected {MAX_ORDER + 1} derivative closed forms, got {len(derivatives)}")

    def jet_fn(x, order):
        return np.stack([np.broadcast_to(np.asarray(d(x) if callable(d) else d, dtype=float), x.shape)
                         for d in derivatives[: order + 1]])

    return C4Function(jet_fn, domain, name)


def compose(outer: C4Function, inner: C4Function) -> C4Function:
    """outer o inner, differentiated with Faa di Bruno's rule."""

    def jet_fn(x, order):
        inner_jet = inner.jet(x, order)
        return jets.compose(outer.jet(inner_jet[0], order), inner_jet)

    return C4Function(jet_fn, inner.domain, f"{outer.name}({inner.name})")


def eval_sgamma(gamma: float, x):
    """Sine type solution S_gamma of F'' = gamma*F with S(0)=0, S'(0)=1."""
    gamma = float(gamma)
    xs = np.asarray(x, dtype=float)
    z = gamma * xs * xs
    series = xs * polynomial.polyval(z, SINE_SERIES)
    with np.errstate(invalid="ignore", over="ignore"):
        if gamma < 0:
            w = np.sqrt(-gamma)
            closed = np.sin(w * xs) / w
        elif gamma > 0:
            w = np.sqrt(gamma)
            closed = np.sinh(w * xs) / w
        else:
            closed = xs
    return as_output(np.where(np.abs(z) < SERIES_SWITCHOVER, series, closed), x)


def eval_cgamma(gamma: float, x):
    """Cosine type solution C_gamma of F'' = gamma*F with C(0)=1, C'(0)=0."""
    gamma = float(gamma)
    xs = np.asarray(x, dtype=float)
    z = gamma * xs * xs
    series = polynomial.polyval(z, COSINE_SERIES)
    with np.errstate(invalid="ignore", over="ignore"):
        if gamma < 0:
            closed = np.cos(np.sqrt(-gamma) * xs)
        elif gamma > 0:
            closed = np.cosh(np.sqrt(gamma) * xs)
        else:
            closed = np.ones_like(xs)
    return as_output(np.where(np.abs(z) < SERIES_SWITCHOVER, series, closed), x)


@dataclass(frozen=True)
class GammaSolution:
    """a*S_gamma + b*C_gamma on a domain.

    S' = C and C' = gamma*S, so F^(2m) = gamma^m F and F^(2m+1) = gamma^m F'.
    """
    gamma: float
    a: float
    b: float
    domain: Interval

    @property
    def label(self) -> str:
        return f"{self.a:g}*S+{self.b:g}*C"

    def jet(self, x, order: int = MAX_ORDER) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = np.asarray(eval_sgamma(self.gamma, x))
        c = np.asarray(eval_cgamma(self.gamma, x))
        value = self.a * s + self.b * c
        slope = self.a * c + self.b * self.gamma * s
        out = np.empty((order + 1, *x.shape))
        for k in range(order + 1):
            out[k] = self.gamma ** (k // 2) * (value if k % 2 == 0 else slope)
        return out

    def eval(self, order: int, x):
        return as_output(self.jet(x, order)[order], x)

    def __call__(self, x):
        return self.eval(0, x)

    def scaled(self, factor: float) -> "GammaSolution":
        return GammaSolution(self.gamma, factor * self.a, factor * self.b, self.domain)

    def as_function(self, name: str | None = None) -> C4Function:
        return C4Function(lambda x, order: self.jet(x, order), self.domain, name or self.label)


@dataclass(frozen=True)
class WronskianPair:
    first: GammaSolution
    second: GammaSolution
    wronskian: float

    @property
    def independence_floor(self) -> float:
        u, v = self.first, self.second
        return WRONSKIAN_RELATIVE_FLOOR * (abs(u.a) + abs(u.b)) * (abs(v.a) + abs(v.b))

    @property
    def is_independent(self) -> bool:
        return abs(self.wronskian) > self.independence_floor

    def wronskian_at(self, x):
        """u'v - uv' evaluated pointwise; constant by Liouville's theorem."""
        u, v = self.first.jet(x, 1), self.second.jet(x, 1)
        return as_output(u[1] * v[0] - u[0] * v[1], x)


def wronskian_pair(u: GammaSolution, v: GammaSolution) -> WronskianPair:
    if u.gamma != v.gamma:
        raise IncompatibleSolutions(f"solutions of different equations: gamma {u.gamma} vs {v.gamma}")
    if u.domain != v.domain:
        raise IncompatibleSolutions("solutions live on different domains")
    # (a1 C + b1 g S)(a2 S + b2 C) - (a1 S + b1 C)(a2 C + b2 g S) = (a1 b2 - b1 a2)(C^2 - g S^2)
    return WronskianPair(u, v, u.a * v.b - u.b * v.a)


def _nearest_zero(fn: Callable, anchor: float, end: float) -> float | None:
    """First sign change of fn walking from anchor towards end, refined by bisection."""
    xs = np.linspace(anchor, end, ZERO_SCAN_POINTS + 1)[1:]
    values = np.asarray(fn(xs))
    hits = np.flatnonzero(values <= 0.0)
    if hits.size == 0:
        return None
    i = hits[0]
    if values[i] == 0.0:
        return float(xs[i])
    left = anchor if i == 0 else xs[i - 1]
    return bisect(lambda t: float(fn(t)), left, xs[i], xtol=1e-15,
                  rtol=4 * np.finfo(float).eps, maxiter=ZERO_BISECTION_STEPS, disp=False)


def positive_subinterval(v: GammaSolution, anchor: float) -> Interval:
    """Largest open subinterval of v.domain containing anchor on which v > 0."""
    v.domain.require(anchor, "anchor")
    if v(anchor) <= 0:
        raise AnchorNotPositive(f"v({anchor}) = {v(anchor)} is not positive")

    lo, hi = v.domain.lo, v.domain.hi
    if v.gamma < 0:
        # v = R cos(w x - theta), zeros at w x = theta + pi/2 + k pi
        w = np.sqrt(-v.gamma)
        theta = np.arctan2(v.a / w, v.b)
        t = (w * anchor - theta - np.pi / 2) / np.pi
        lo = max(lo, (theta + np.pi / 2 + (np.ceil(t) - 1) * np.pi) / w)
        hi = min(hi, (theta + np.pi / 2 + (np.floor(t) + 1) * np.pi) / w)
    elif v.gamma == 0:
        if v.a != 0:
            zero = -v.b / v.a
            if zero > anchor:
                hi = min(hi, zero)
            else:
                lo = max(lo, zero)
    else:
        below = _nearest_zero(v, anchor, lo)
        above = _nearest_zero(v, anchor, hi)
        lo = lo if below is None else below
        hi = hi if above is None else above
    return Interval(float(lo), float(hi))


def require_positive(v: GammaSolution, what: str = "v"):
    anchor = v.domain.midpoint
    if v(anchor) <= 0:
        raise NotPositive(f"{what} = {v.label} is not positive at {anchor}")
    support = positive_subinterval(v, anchor)
    if not support.covers(v.domain):
        raise NotPositive(f"{what} = {v.label} vanishes inside the domain; "
                          f"positive only on ({support.lo:.6g}, {support.hi:.6g})")


def ratio_function(u: GammaSolution, v: GammaSolution) -> C4Function:
    """f = u/v with derivatives from the exact quotient rule; f' = W(u,v)/v^2."""
    pair = wronskian_pair(u, v)
    if not pair.is_independent:
        raise NotIndependent(f"W({u.label}, {v.label}) = {pair.wronskian:g} vanishes")
    require_positive(v)
    jet_fn = lambda x, order: jets.quotient(u.jet(x, order), v.jet(x, order))
    return C4Function(jet_fn, v.domain, f"({u.label})/({v.label})")


def _derivative_stack(f: C4Function, x, order: int) -> np.ndarray:
    f.domain.require(x)
    j = f.jet(x, order)
    if np.any(np.abs(j[1]) < DERIVATIVE_FLOOR):
        raise VanishingDerivative(f"{f.name}' vanishes on the requested points")
    return j


def schwarzian(f: C4Function, x):
    """S(f) = f'''/f' - 3/2 (f''/f')^2."""
    j = _derivative_stack(f, x, 3)
    return as_output(j[3] / j[1] - 1.5 * (j[2] / j[1]) ** 2, x)


def schwarzian_derivative(f: C4Function, x):
    """S(f)' = f''''/f' - 4 f''' f''/f'^2 + 3 f''^3/f'^3."""
    j = _derivative_stack(f, x, 4)
    d1 = j[1]
    return as_output(j[4] / d1 - 4 * j[3] * j[2] / d1 ** 2 + 3 * j[2] ** 3 / d1 ** 3, x)


def schwarzian_samples(f: C4Function, n: int) -> np.ndarray:
    """S(f) on n Chebyshev points of the domain."""
    values = np.asarray(schwarzian(f, f.domain.chebyshev_points(n)))
    logger.debug(f"S({f.name}) sampled on {n} points: range [{values.min():.3g}, {values.max():.3g}]")
    return values
