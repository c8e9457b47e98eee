"""Closed-form functions and weight splits addressable by name.

Transcendental entries list f and its first four derivatives explicitly, so
they double as independent references for the jet-based constructions.
identity and cubic are assembled from jets.
"""
from __future__ import annotations

from math import factorial
from typing import Callable, Sequence

import numpy as np

from bajra import jets
from bajra.exceptions import NotIndependent, OutOfDomain, UnknownBuiltin
from bajra.functions import C4Function, Interval, from_derivatives


def identity(domain: Interval) -> C4Function:
    return C4Function(jets.identity, domain, "identity")


def constant(value: float, domain: Interval) -> C4Function:
    return from_derivatives([value, 0.0, 0.0, 0.0, 0.0], domain, f"{value:g}")


def tan(domain: Interval) -> C4Function:
    if domain.lo <= -np.pi / 2 or domain.hi >= np.pi / 2:
        raise OutOfDomain("tan needs a domain inside (-pi/2, pi/2)")
    # t' = s, s' = 2ts with t = tan, s = sec^2
    t = np.tan
    s = lambda x: 1 + np.tan(x) ** 2
    return from_derivatives([
        t,
        s,
        lambda x: 2 * t(x) * s(x),
        lambda x: 2 * s(x) ** 2 + 4 * t(x) ** 2 * s(x),
        lambda x: 16 * t(x) * s(x) ** 2 + 8 * t(x) ** 3 * s(x),
    ], domain, "tan")


def tanh(domain: Interval) -> C4Function:
    # t' = s, s' = -2ts with t = tanh, s = sech^2
    t = np.tanh
    s = lambda x: 1 - np.tanh(x) ** 2
    return from_derivatives([
        t,
        s,
        lambda x: -2 * t(x) * s(x),
        lambda x: -2 * s(x) ** 2 + 4 * t(x) ** 2 * s(x),
        lambda x: 16 * t(x) * s(x) ** 2 - 8 * t(x) ** 3 * s(x),
    ], domain, "tanh")


def exp_rate(rate: float, domain: Interval) -> C4Function:
    """x -> exp(rate * x)."""
    return from_derivatives([lambda x, k=k: rate ** k * np.exp(rate * x) for k in range(5)],
                            domain, f"exp({rate:g}x)")


def exp(domain: Interval) -> C4Function:
    f = exp_rate(1.0, domain)
    f.name = "exp"
    return f


def quadratic(mu: float, domain: Interval) -> C4Function:
    """x -> 1 + mu x^2."""
    return from_derivatives([lambda x: 1 + mu * x * x, lambda x: 2 * mu * x, 2 * mu, 0.0, 0.0],
                            domain, f"(1+{mu:g}x^2)")


def mobius(a: float, b: float, c: float, d: float, domain: Interval) -> C4Function:
    """(a x + b)/(c x + d); the n-th derivative is (ad-bc)(-1)^(n+1) n! c^(n-1)/(cx+d)^(n+1)."""
    det = a * d - b * c
    if det == 0:
        raise NotIndependent(f"mobius({a}, {b}, {c}, {d}) is constant: ad = bc")
    if (c * domain.lo + d) * (c * domain.hi + d) <= 0:
        raise OutOfDomain(f"mobius({a}, {b}, {c}, {d}) has its pole inside ({domain.lo}, {domain.hi})")

    def derivative(n: int) -> Callable:
        return lambda x: det * (-1) ** (n + 1) * factorial(n) * c ** (n - 1) / (c * x + d) ** (n + 1)

    return from_derivatives([lambda x: (a * x + b) / (c * x + d)] + [derivative(n) for n in range(1, 5)],
                            domain, f"mobius({a:g},{b:g},{c:g},{d:g})")


def cubic(domain: Interval) -> C4Function:
    """x + x^3, a monotone function outside every constant-Schwarzian family."""
    def jet_fn(x, order):
        t = jets.identity(x, order)
        return t + jets.power(t, 3)

    return C4Function(jet_fn, domain, "cubic")


def cos(domain: Interval) -> C4Function:
    return from_derivatives([np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin, np.cos],
                            domain, "cos")


def cosh(domain: Interval) -> C4Function:
    return from_derivatives([np.cosh, np.sinh, np.cosh, np.sinh, np.cosh], domain, "cosh")


FUNCTIONS: dict[str, tuple[int, Callable[..., C4Function]]] = {
    "identity": (0, identity),
    "tan": (0, tan),
    "tanh": (0, tanh),
    "exp": (0, exp),
    "mobius": (4, mobius),
    "cubic": (0, cubic),
    "cos": (0, cos),
    "cosh": (0, cosh),
}

SPLITS: dict[str, tuple[int, Callable[..., C4Function]]] = {
    "constant": (1, constant),
    "exp": (1, exp_rate),
    "quadratic": (1, quadratic),
}


def _build(registry: dict, kind: str, name: str, params: Sequence[float], domain: Interval) -> C4Function:
    if name not in registry:
        raise UnknownBuiltin(f"unknown {kind} '{name}'; known: {', '.join(sorted(registry))}")
    arity, builder = registry[name]
    if len(params) != arity:
        raise UnknownBuiltin(f"{kind} '{name}' takes {arity} parameters, got {len(params)}")
    return builder(*[float(p) for p in params], domain)


def make_function(name: str, params: Sequence[float] = (), domain: Interval = Interval(-1.0, 1.0)) -> C4Function:
    return _build(FUNCTIONS, "function", name, params, domain)


def make_split(kind: str, params: Sequence[float], domain: Interval) -> C4Function:
    return _build(SPLITS, "split", kind, params, domain)
