"""Solution families of the invariance equation A_{f,p} + A_{g,q} = x + y.

A family is given by two fundamental-system pairs (u, v) and (w, z) of
F'' = gamma F together with a free positive split p = (p1, p2); the second
weight pair is forced to q_i = v z / p_i. Besides constructing such pairs
this module measures how far an arbitrary pair of means is from being one,
and reconstructs the family data from the means when it is.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

import settings
from bajra import diagonal
from bajra.exceptions import (
    AnchorNotPositive,
    DomainEmpty,
    NonConstantSchwarzian,
    NotIndependent,
    OutOfDomain,
    VanishingDerivative,
)
from bajra.functions import (
    DERIVATIVE_FLOOR,
    C4Function,
    GammaSolution,
    Interval,
    eval_cgamma,
    eval_sgamma,
    positive_subinterval,
    ratio_function,
    require_positive,
    schwarzian,
    schwarzian_derivative,
    schwarzian_samples,
    wronskian_pair,
)
from bajra.means import BajraktarevicMean, WeightPair, invert_monotone
from settings import logger

SCHWARZIAN_SAMPLES = 33
SCHWARZIAN_CONSTANCY = 1e-6
RECOVERY_GRID = 65
COINCIDENCE_TOLERANCE = 1e-9
GAMMA_MATCH = 1e-8
RECONSTRUCTION_TOLERANCE = 1e-9
ETA_SPREAD = 1e-7
# sqrt(delta / (W(u,v) W(w,z))) against the fitted eta, relative
ETA_AGREEMENT = 1e-6
WEIGHT_TARGETS = ("p1", "p2", "q1", "q2")


@dataclass(frozen=True)
class SolutionFamily:
    """u = a1 S + b1 C, v = c1 S + d1 C; w, z likewise from g_coeffs.

    ``g_gamma`` builds w and z from a different equation while keeping
    p1 q1 = p2 q2 = v z; such a pair satisfies the weight conditions and
    nothing else.
    """
    gamma: float
    f_coeffs: tuple[float, float, float, float]
    g_coeffs: tuple[float, float, float, float]
    split1: C4Function
    split2: C4Function
    domain: Interval
    g_gamma: float | None = None

    @property
    def gamma_g(self) -> float:
        return self.gamma if self.g_gamma is None else self.g_gamma

    def solutions(self, domain: Interval | None = None) -> tuple[GammaSolution, ...]:
        domain = domain or self.domain
        a1, b1, c1, d1 = self.f_coeffs
        a2, b2, c2, d2 = self.g_coeffs
        return (GammaSolution(self.gamma, a1, b1, domain), GammaSolution(self.gamma, c1, d1, domain),
                GammaSolution(self.gamma_g, a2, b2, domain), GammaSolution(self.gamma_g, c2, d2, domain))


def _positive_domain(v: GammaSolution, z: GammaSolution, domain: Interval) -> Interval:
    """Component of {v > 0, z > 0} around the domain midpoint."""
    anchor = domain.midpoint
    try:
        common = positive_subinterval(v, anchor).intersect(positive_subinterval(z, anchor))
    except AnchorNotPositive as e:
        raise DomainEmpty(f"no positivity interval of v and z around {anchor}: {e}") from e
    if common is None:
        raise DomainEmpty(f"positivity intervals of v and z do not meet around {anchor}")
    if not common.covers(domain):
        logger.warning(f"Domain shrunk from ({domain.lo:g}, {domain.hi:g}) to ({common.lo:.6g}, {common.hi:.6g})")
    return common


def construct_family(family: SolutionFamily, shrink: bool = False) -> tuple[BajraktarevicMean, BajraktarevicMean]:
    """The pair (A_{u/v, p}, A_{w/z, q}) with q_i = v z / p_i.

    With ``shrink`` the domain is cut down to where v and z are positive
    instead of rejecting the family.
    """
    u, v, w, z = family.solutions()
    for first, second, side in ((u, v, "f"), (w, z, "g")):
        pair = wronskian_pair(first, second)
        if not pair.is_independent:
            raise NotIndependent(f"{side}-side solutions {first.label} and {second.label} are dependent "
                                 f"(W = {pair.wronskian:g})")

    domain = family.domain
    if shrink:
        domain = _positive_domain(v, z, domain)
        u, v, w, z = family.solutions(domain)
    else:
        require_positive(v, "v")
        require_positive(z, "z")

    f = ratio_function(u, v)
    g = ratio_function(w, z)
    vz = v.as_function("v") * z.as_function("z")
    p1 = family.split1.restrict(domain)
    p2 = family.split2.restrict(domain)
    mf = BajraktarevicMean(f, WeightPair(p1, p2, domain))
    mg = BajraktarevicMean(g, WeightPair(vz / p1, vz / p2, domain))
    logger.debug(f"Constructed family gamma={family.gamma:g} on ({domain.lo:g}, {domain.hi:g}): "
                 f"f={f.name}, g={g.name}")
    return mf, mg


def perturb_weight(mf: BajraktarevicMean, mg: BajraktarevicMean, target: str,
                   epsilon: float) -> tuple[BajraktarevicMean, BajraktarevicMean]:
    """Multiply one of p1, p2, q1, q2 by 1 + epsilon x^2."""
    if target not in WEIGHT_TARGETS:
        raise ValueError(f"perturbation target must be one of {WEIGHT_TARGETS}, got {target!r}")
    domain = mf.domain
    factor = C4Function(lambda x, order: _bump_jet(x, order, epsilon), domain, f"(1+{epsilon:g}x^2)")
    m = mf if target[0] == "p" else mg
    p1, p2 = m.p.p1, m.p.p2
    if target[1] == "1":
        p1 = p1 * factor
    else:
        p2 = p2 * factor
    perturbed = m.with_weights(WeightPair(p1, p2, m.domain))
    return (perturbed, mg) if target[0] == "p" else (mf, perturbed)


def _bump_jet(x, order, epsilon):
    jet = np.zeros((order + 1, *x.shape))
    jet[0] = 1 + epsilon * x * x
    if order >= 1:
        jet[1] = 2 * epsilon * x
    if order >= 2:
        jet[2] = 2 * epsilon
    return jet


def common_domain(mf: BajraktarevicMean, mg: BajraktarevicMean) -> Interval:
    domain = mf.domain.intersect(mg.domain)
    if domain is None:
        raise DomainEmpty("the two means have disjoint domains")
    return domain


def _axis(mf, mg, grid) -> np.ndarray:
    if np.ndim(grid) == 0:
        return common_domain(mf, mg).interior_grid(int(grid))
    return np.asarray(grid, dtype=float)


@dataclass
class ResidualReport:
    grid_size: int
    max_invariance: float | None = None
    cond1: float | None = None
    cond2: float | None = None
    cond3: float | None = None
    cond4: float | None = None
    delta_fit: float | None = None
    delta_spread: float | None = None

    def failures(self, tolerances: dict | None = None) -> list[str]:
        tol = {**settings.DEFAULT_TOLERANCES, **(tolerances or {})}
        checks = {
            "invariance": (self.max_invariance, tol["invariance"]),
            "cond1": (self.cond1, tol["necessary"]),
            "cond2": (self.cond2, tol["necessary"]),
            "cond3": (self.cond3, tol["necessary"]),
            "cond4": (self.cond4, tol["necessary"]),
            "delta_spread": (self.delta_spread, tol["delta_spread"]),
        }
        return [name for name, (value, limit) in checks.items() if value is not None and not value <= limit]

    def passed(self, tolerances: dict | None = None) -> bool:
        return not self.failures(tolerances)

    def merged(self, other: "ResidualReport") -> "ResidualReport":
        values = {k: v for k, v in asdict(other).items() if v is not None}
        return replace(self, **values)

    def to_dict(self) -> dict:
        return asdict(self)


def residual_grid(mf: BajraktarevicMean, mg: BajraktarevicMean, grid=33):
    """X, Y and |A_{f,p} + A_{g,q} - x - y| on the tensor grid."""
    axis = _axis(mf, mg, grid)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    R = np.abs(mf(X, Y) + mg(X, Y) - X - Y)
    return X, Y, R


def invariance_residual(mf: BajraktarevicMean, mg: BajraktarevicMean, grid=33) -> ResidualReport:
    """``grid`` is a per-axis point count or the axis points themselves."""
    _, _, R = residual_grid(mf, mg, grid)
    report = ResidualReport(grid_size=R.size, max_invariance=float(R.max()))
    logger.debug(f"Invariance residual {report.max_invariance:.3g} on {R.shape[0]}x{R.shape[1]} grid")
    return report


def identity_uvwz_check(family: SolutionFamily, samples: Sequence[np.ndarray]) -> float:
    """Max deviation from x + y of

        (u/v)^-1((t u(x) + s u(y))/(t v(x) + s v(y))) + (w/z)^-1((s w(x) + t w(y))/(s z(x) + t z(y)))

    over samples (x, y, t, s) with t, s > 0.
    """
    x, y, t, s = (np.asarray(a, dtype=float) for a in samples)
    if np.any(t <= 0) or np.any(s <= 0):
        raise OutOfDomain("weights t and s must be positive")
    family.domain.require(x, "x")
    family.domain.require(y, "y")
    u, v, w, z = family.solutions()
    f, g = ratio_function(u, v), ratio_function(w, z)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    left = invert_monotone(f, (t * u(x) + s * u(y)) / (t * v(x) + s * v(y)), lo, hi,
                           np.sign(wronskian_pair(u, v).wronskian))
    right = invert_monotone(g, (s * w(x) + t * w(y)) / (s * z(x) + t * z(y)), lo, hi,
                            np.sign(wronskian_pair(w, z).wronskian))
    return float(np.max(np.abs(left + right - x - y)))


def necessary_residuals(mf: BajraktarevicMean, mg: BajraktarevicMean, grid=33) -> ResidualReport:
    """The four necessary conditions on an n-point grid of the common domain.

    cond1: p1 q1 = p2 q2, relative.
    cond2: (p1 q1)^2 f' g' is a nonzero constant, relative to its median.
    cond3: (p1 - p2)(S(f) - S(g)) = 0.
    cond4: (p1 - p2)(S(f)' + S(g)') = 0.
    """
    x = _axis(mf, mg, grid)
    p1, p2 = mf.p.p1(x), mf.p.p2(x)
    q1, q2 = mg.p.p1(x), mg.p.p2(x)
    left, right = p1 * q1, p2 * q2
    cond1 = np.max(np.abs(left - right) / np.maximum(np.abs(left), np.abs(right)))

    delta = left ** 2 * mf.f.eval(1, x) * mg.f.eval(1, x)
    fit = float(np.median(delta))
    if fit == 0:
        cond2 = spread = np.inf
    else:
        cond2 = np.max(np.abs(delta - fit)) / abs(fit)
        spread = (delta.max() - delta.min()) / abs(fit)

    gap = p1 - p2
    cond3 = np.max(np.abs(gap * (schwarzian(mf.f, x) - schwarzian(mg.f, x))))
    cond4 = np.max(np.abs(gap * (schwarzian_derivative(mf.f, x) + schwarzian_derivative(mg.f, x))))
    report = ResidualReport(grid_size=x.size, cond1=float(cond1), cond2=float(cond2), cond3=float(cond3),
                            cond4=float(cond4), delta_fit=fit, delta_spread=float(spread))
    logger.debug(f"Necessary residuals: {report}")
    return report


@dataclass(frozen=True)
class SystemReport:
    """Sup-norms of the diagonal system: first sum minus one, then the three mixed sums."""
    first: float
    second: float
    third: float
    fourth: float
    grid_size: int

    def failures(self, tolerance: float | None = None) -> list[str]:
        tolerance = settings.DEFAULT_TOLERANCES["system"] if tolerance is None else tolerance
        values = {"system1": self.first, "system2": self.second, "system3": self.third, "system4": self.fourth}
        return [name for name, value in values.items() if not value <= tolerance]

    def passed(self, tolerance: float | None = None) -> bool:
        return not self.failures(tolerance)

    def to_dict(self) -> dict:
        return asdict(self)


def diagonal_system_check(mf: BajraktarevicMean, mg: BajraktarevicMean, grid=33) -> SystemReport:
    x = _axis(mf, mg, grid)
    sup = lambda values: float(np.max(np.abs(values)))
    return SystemReport(
        first=sup(diagonal.formula_first(mf, 1, x) + diagonal.formula_first(mg, 1, x) - 1),
        second=sup(diagonal.formula_mixed2(mf, x) + diagonal.formula_mixed2(mg, x)),
        third=sup(diagonal.formula_mixed3(mf, x) + diagonal.formula_mixed3(mg, x)),
        fourth=sup(diagonal.formula_mixed4(mf, x) + diagonal.formula_mixed4(mg, x)),
        grid_size=x.size,
    )


@dataclass(frozen=True)
class RecoveredPair:
    gamma: float
    u: GammaSolution
    v: GammaSolution
    support: Interval
    residual: float

    def __iter__(self):
        return iter((self.gamma, self.u, self.v))


def _from_initial_values(gamma: float, x0: float, value: float, slope: float, domain: Interval) -> GammaSolution:
    """The solution with F(x0) = value, F'(x0) = slope.

    In the shifted basis F = value C(x - x0) + slope S(x - x0); the addition
    rules C(x - x0) = C(x)C(x0) - gamma S(x)S(x0), S(x - x0) = S(x)C(x0) - C(x)S(x0)
    give the unshifted coefficients.
    """
    s0, c0 = eval_sgamma(gamma, x0), eval_cgamma(gamma, x0)
    a = -gamma * value * s0 + slope * c0
    b = value * c0 - slope * s0
    return GammaSolution(gamma, float(a), float(b), domain)


def recover_uv(f: C4Function, x0: float, samples: int = SCHWARZIAN_SAMPLES) -> RecoveredPair:
    """gamma and (u, v) with u(x0) = f(x0), v(x0) = 1 and f = u/v, for f of constant Schwarzian."""
    f.domain.require(x0, "x0")
    f0, f1, f2 = f.jet(x0, 2)
    if abs(f1) < DERIVATIVE_FLOOR:
        raise VanishingDerivative(f"{f.name}'({x0}) = {f1:g}")
    values = schwarzian_samples(f, samples)
    middle = float(np.median(values))
    if values.max() - values.min() >= SCHWARZIAN_CONSTANCY * (1 + abs(middle)):
        raise NonConstantSchwarzian(f"S({f.name}) ranges over [{values.min():.6g}, {values.max():.6g}]")

    gamma = -schwarzian(f, x0) / 2
    u = _from_initial_values(gamma, x0, f0, f1 - 0.5 * f2 * f0 / f1, f.domain)
    v = _from_initial_values(gamma, x0, 1.0, -0.5 * f2 / f1, f.domain)
    support = positive_subinterval(v, x0)
    points = support.interior_grid(RECOVERY_GRID)
    residual = float(np.max(np.abs(f(points) - u(points) / v(points))))
    logger.debug(f"Recovered gamma={gamma:.12g} for {f.name}: u={u.label}, v={v.label}, residual {residual:.3g}")
    return RecoveredPair(float(gamma), u, v, support, residual)


@dataclass
class Verdict:
    kind: str
    residuals: ResidualReport
    system: SystemReport
    coincidence_fraction: float
    failed: list[str] = field(default_factory=list)
    gamma: float | None = None
    f_coeffs: tuple[float, ...] | None = None
    g_coeffs: tuple[float, ...] | None = None
    eta: float | None = None
    reason: str | None = None

    @property
    def confirmed(self) -> bool:
        return self.kind == "ConfirmedFamily"

    @property
    def label(self) -> str:
        if self.confirmed:
            return f"ConfirmedFamily(gamma={self.gamma:.10g})"
        if self.kind == "NecessaryFail":
            return f"NecessaryFail({', '.join(self.failed)})"
        return self.kind

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "failed": list(self.failed),
            "gamma": self.gamma,
            "f_coeffs": None if self.f_coeffs is None else list(self.f_coeffs),
            "g_coeffs": None if self.g_coeffs is None else list(self.g_coeffs),
            "eta": self.eta,
            "reason": self.reason,
            "coincidence_fraction": self.coincidence_fraction,
        }


def classify_solution(mf: BajraktarevicMean, mg: BajraktarevicMean, grid=33,
                      tolerances: dict | None = None) -> Verdict:
    tol = {**settings.DEFAULT_TOLERANCES, **(tolerances or {})}
    x = _axis(mf, mg, grid)
    residuals = necessary_residuals(mf, mg, x)
    system = diagonal_system_check(mf, mg, x)
    coincidence = float(np.mean(np.abs(mf.p.p1(x) - mf.p.p2(x)) < COINCIDENCE_TOLERANCE))
    verdict = lambda kind, **extra: Verdict(kind, residuals, system, coincidence, **extra)

    failed = residuals.failures(tol) + system.failures(tol["system"])
    if failed:
        logger.info(f"Necessary conditions fail: {', '.join(failed)}")
        return verdict("NecessaryFail", failed=failed)

    x0 = common_domain(mf, mg).midpoint
    try:
        f_side = recover_uv(mf.f, x0)
        g_side = recover_uv(mg.f, x0)
    except (NonConstantSchwarzian, VanishingDerivative, AnchorNotPositive) as e:
        return verdict("ReconstructionFail", reason=f"{type(e).__name__}: {e}")

    gamma = f_side.gamma
    if abs(gamma - g_side.gamma) > GAMMA_MATCH * (1 + abs(gamma)):
        return verdict("ReconstructionFail", reason=f"f and g solve different equations: gamma "
                                                    f"{gamma:.10g} vs {g_side.gamma:.10g}")
    worst = max(f_side.residual, g_side.residual)
    if worst > RECONSTRUCTION_TOLERANCE:
        return verdict("ReconstructionFail", reason=f"|f - u/v| reaches {worst:.3g}")

    # p1 q1 / (v z) must be a positive constant eta, absorbed into (u, v)
    ratio = mf.p.p1(x) * mg.p.p1(x) / (f_side.v(x) * g_side.v(x))
    eta = float(np.median(ratio))
    if not eta > 0 or np.max(np.abs(ratio - eta)) > ETA_SPREAD * eta:
        return verdict("ReconstructionFail", reason=f"p1 q1 / (v z) is not a positive constant (median {eta:.6g})")
    alpha = wronskian_pair(f_side.u, f_side.v).wronskian
    beta = wronskian_pair(g_side.u, g_side.v).wronskian
    eta_squared = residuals.delta_fit / (alpha * beta)
    if not eta_squared > 0:
        return verdict("ReconstructionFail", reason=f"delta / (W(u,v) W(w,z)) = {eta_squared:.6g} is not positive")
    if abs(np.sqrt(eta_squared) - eta) > ETA_AGREEMENT * eta:
        return verdict("ReconstructionFail", reason=f"eta {eta:.10g} disagrees with delta fit {np.sqrt(eta_squared):.10g}")

    u, v = f_side.u.scaled(eta), f_side.v.scaled(eta)
    w, z = g_side.u, g_side.v
    logger.info(f"Confirmed family gamma={gamma:.10g}, eta={eta:.6g}")
    return verdict("ConfirmedFamily", gamma=gamma, eta=eta,
                   f_coeffs=(u.a, u.b, v.a, v.b), g_coeffs=(w.a, w.b, z.a, z.b))
