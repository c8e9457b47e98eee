"""Named means and mean pairs for the CLI and the acceptance suite."""
from __future__ import annotations

from typing import Callable

from bajra import builtins
from bajra.exceptions import UnknownBuiltin
from bajra.functions import Interval
from bajra.invariance import SolutionFamily, construct_family
from bajra.means import BajraktarevicMean, WeightPair

UNIT = Interval(-1.0, 1.0)
TAN_DOMAIN = Interval(-1.2, 1.2)


def _mean(f, p1, p2, domain: Interval) -> BajraktarevicMean:
    return BajraktarevicMean(f, WeightPair(p1, p2, domain))


def arithmetic(domain: Interval = UNIT) -> BajraktarevicMean:
    one = builtins.constant(1.0, domain)
    return _mean(builtins.identity(domain), one, one, domain)


def tan_cos() -> BajraktarevicMean:
    cos = builtins.cos(TAN_DOMAIN)
    return _mean(builtins.tan(TAN_DOMAIN), cos, cos, TAN_DOMAIN)


def exp_weight() -> BajraktarevicMean:
    return _mean(builtins.identity(UNIT), builtins.exp(UNIT), builtins.constant(1.0, UNIT), UNIT)


def mobius_quadratic() -> BajraktarevicMean:
    return _mean(builtins.mobius(2.0, 1.0, 1.0, 3.0, UNIT), builtins.quadratic(0.25, UNIT),
                 builtins.constant(1.0, UNIT), UNIT)


def tanh_cosh() -> BajraktarevicMean:
    cosh = builtins.cosh(UNIT)
    return _mean(builtins.tanh(UNIT), cosh, cosh, UNIT)


def family_quarter() -> BajraktarevicMean:
    """f-side mean of a fixed gamma = 0.25 family.

    u = S, v = C (f = 2 tanh(x/2)), w = S, z = S/2 + C = e^(x/2), with
    p = (e^(0.3x), 1 + x^2/2).
    """
    family = SolutionFamily(0.25, (1.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.5, 1.0),
                            builtins.exp_rate(0.3, UNIT), builtins.quadratic(0.5, UNIT), UNIT)
    mf, _ = construct_family(family)
    return mf


MEANS: dict[str, Callable[[], BajraktarevicMean]] = {
    "arithmetic": arithmetic,
    "tan-cos": tan_cos,
    "exp-weight": exp_weight,
    "mobius-quadratic": mobius_quadratic,
    "tanh-cosh": tanh_cosh,
    "family-quarter": family_quarter,
}


def arithmetic_pair() -> tuple[BajraktarevicMean, BajraktarevicMean]:
    return arithmetic(), arithmetic()


def tan_exp_pair() -> tuple[BajraktarevicMean, BajraktarevicMean]:
    """f = tan with p = (e^x, 1) against g = exp with q = (e^-x, 1).

    p1 q1 = p2 q2 holds, but S(tan) = 2 and S(exp) = -1/2 differ where p1 != p2.
    """
    one = builtins.constant(1.0, UNIT)
    mf = _mean(builtins.tan(UNIT), builtins.exp(UNIT), one, UNIT)
    mg = _mean(builtins.exp(UNIT), builtins.exp_rate(-1.0, UNIT), one, UNIT)
    return mf, mg


PAIRS: dict[str, Callable[[], tuple[BajraktarevicMean, BajraktarevicMean]]] = {
    "arithmetic": arithmetic_pair,
    "tan-exp": tan_exp_pair,
}


def builtin_mean(name: str) -> BajraktarevicMean:
    if name not in MEANS:
        raise UnknownBuiltin(f"unknown builtin mean '{name}'; known: {', '.join(MEANS)}")
    return MEANS[name]()


def builtin_pair(name: str) -> tuple[BajraktarevicMean, BajraktarevicMean]:
    if name not in PAIRS:
        raise UnknownBuiltin(f"unknown builtin pair '{name}'; known: {', '.join(PAIRS)}")
    return PAIRS[name]()
