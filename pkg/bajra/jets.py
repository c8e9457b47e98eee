"""Derivative stacks ("jets") and their exact calculus rules.

A jet of order n is an array ``J`` of shape ``(n + 1, *points)`` with
``J[k]`` holding the k-th derivative at each point. Products, quotients and
compositions are carried out with the Leibniz and Faa di Bruno rules, so no
derivative in the library is ever taken by finite differences.
"""
from math import comb

import numpy as np


def order_of(jet: np.ndarray) -> int:
    return len(jet) - 1


def constant(value, order: int, shape=()) -> np.ndarray:
    jet = np.zeros((order + 1, *shape))
    jet[0] = value
    return jet


def identity(x: np.ndarray, order: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    jet = np.zeros((order + 1, *x.shape))
    jet[0] = x
    if order >= 1:
        jet[1] = 1.0
    return jet


def truncate(jet: np.ndarray, order: int) -> np.ndarray:
    return jet[: order + 1]


def shift(jet: np.ndarray) -> np.ndarray:
    """Jet of the derivative: drops the value, loses one order."""
    return jet[1:]


def product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = min(len(a), len(b))
    out = np.zeros((n, *np.broadcast_shapes(a.shape[1:], b.shape[1:])))
    for k in range(n):
        out[k] = sum(comb(k, j) * a[j] * b[k - j] for j in range(k + 1))
    return out


def quotient(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Jet of a/b from b*q = a, solved order by order."""
    n = min(len(a), len(b))
    out = np.zeros((n, *np.broadcast_shapes(a.shape[1:], b.shape[1:])))
    for k in range(n):
        acc = a[k] - sum(comb(k, j) * b[j] * out[k - j] for j in range(1, k + 1))
        out[k] = acc / b[0]
    return out


def power(a: np.ndarray, exponent: int) -> np.ndarray:
    out = constant(1.0, order_of(a), a.shape[1:])
    for _ in range(exponent):
        out = product(out, a)
    return out


def compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Jet of F(g(x)) given F's jet evaluated at g(x) and g's jet at x.

    Faa di Bruno's formula, written out up to the fourth order.
    """
    n = min(len(outer), len(inner))
    F, g = outer, inner
    out = np.zeros((n, *np.broadcast_shapes(F.shape[1:], g.shape[1:])))
    out[0] = F[0]
    if n > 1:
        out[1] = F[1] * g[1]
    if n > 2:
        out[2] = F[2] * g[1] ** 2 + F[1] * g[2]
    if n > 3:
        out[3] = F[3] * g[1] ** 3 + 3 * F[2] * g[1] * g[2] + F[1] * g[3]
    if n > 4:
        out[4] = (F[4] * g[1] ** 4 + 6 * F[3] * g[1] ** 2 * g[2]
                  + F[2] * (3 * g[2] ** 2 + 4 * g[1] * g[3]) + F[1] * g[4])
    if n > 5:
        raise ValueError("composition is implemented up to order 4")
    return out


def affine(jet: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    out = alpha * jet
    out[0] = out[0] + beta
    return out
