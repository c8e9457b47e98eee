import dataclasses

import numpy as np
import pytest

from bajra import builtins, catalog, invariance
from bajra.exceptions import DomainEmpty, NonConstantSchwarzian, NotIndependent, NotPositive
from bajra.functions import GammaSolution, Interval, ratio_function, wronskian_pair
from bajra.invariance import (
    SolutionFamily,
    classify_solution,
    construct_family,
    diagonal_system_check,
    identity_uvwz_check,
    invariance_residual,
    necessary_residuals,
    perturb_weight,
    recover_uv,
)
from bajra.means import BajraktarevicMean, WeightPair
from bajra.sampling import GAMMA_VALUES, make_rng, random_family_spec, random_uvwz_samples

DRAWS = 20


def random_families(gamma, draws=DRAWS, seed=7):
    rng = make_rng(seed)
    return [random_family_spec(rng, gamma).to_family() for _ in range(draws)]


def test_identity_family_is_arithmetic(identity_family):
    mf, mg = construct_family(identity_family)
    assert invariance_residual(mf, mg, 33).max_invariance < 1e-13
    assert mf(0.1, 0.5) == pytest.approx(0.3, abs=1e-15)


def test_tan_family_is_half_angle(tan_family):
    mf, mg = construct_family(tan_family)
    np.testing.assert_allclose(mg.p.p1(np.linspace(-1, 1, 5)), np.cos(np.linspace(-1, 1, 5)), rtol=1e-14)
    report = invariance_residual(mf, mg, 33)
    assert report.max_invariance < 1e-12
    assert report.grid_size == 33 * 33


def test_coth_side_is_rejected(unit):
    one = builtins.constant(1.0, unit)
    family = SolutionFamily(1.0, (1, 0, 0, 1), (0, 1, 1, 0), one, one, unit)
    with pytest.raises(NotPositive):
        construct_family(family)
    with pytest.raises(DomainEmpty):
        construct_family(family, shrink=True)


def test_shrink_cuts_domain_to_positivity():
    domain = Interval(-2.0, 2.0)
    one = builtins.constant(1.0, domain)
    family = SolutionFamily(0.0, (0, 1, 1, 1), (1, 0, 0, 1), one, one, domain)
    with pytest.raises(NotPositive):
        construct_family(family)
    mf, mg = construct_family(family, shrink=True)
    assert mf.domain.lo == pytest.approx(-1.0)
    assert mf.domain.hi == 2.0


def test_dependent_coefficients_are_rejected(unit):
    one = builtins.constant(1.0, unit)
    with pytest.raises(NotIndependent):
        construct_family(SolutionFamily(0.0, (1, 2, 2, 4), (1, 0, 0, 1), one, one, unit))


@pytest.mark.parametrize("gamma", GAMMA_VALUES)
def test_random_families_solve_the_invariance_equation(gamma):
    for family in random_families(gamma):
        mf, mg = construct_family(family)
        assert invariance_residual(mf, mg, 33).max_invariance <= 1e-9


@pytest.mark.parametrize("gamma", GAMMA_VALUES)
def test_random_families_pass_necessary_conditions(gamma):
    for family in random_families(gamma):
        mf, mg = construct_family(family)
        report = necessary_residuals(mf, mg, 33)
        assert report.passed(), report
        assert report.delta_spread <= 1e-7
        u, v, w, z = family.solutions()
        product = wronskian_pair(u, v).wronskian * wronskian_pair(w, z).wronskian
        assert abs(report.delta_fit) == pytest.approx(abs(product), rel=1e-10)
        assert diagonal_system_check(mf, mg, 33).passed(1e-8)


@pytest.mark.parametrize("target", invariance.WEIGHT_TARGETS)
def test_single_weight_perturbation_is_detected(target):
    for family in random_families(-1.0, draws=5, seed=11):
        mf, mg = perturb_weight(*construct_family(family), target, 0.01)
        report = necessary_residuals(mf, mg, 33)
        assert max(report.cond1, report.cond2, report.cond3, report.cond4) > 1e-4
        assert not report.passed()


def test_perturbed_dual_weight_breaks_invariance(identity_family):
    mf, mg = construct_family(identity_family)
    mg = mg.with_weights(WeightPair(mg.p.p1 * 1.01, mg.p.p2, mg.domain))
    assert invariance_residual(mf, mg, 33).max_invariance > 1e-4
    assert diagonal_system_check(mf, mg, 33).first > 1e-4


def test_identity_uvwz_on_identity_pair(identity_family, rng):
    samples = random_uvwz_samples(rng, identity_family.domain, 200)
    assert identity_uvwz_check(identity_family, samples) <= 1e-12


def test_identity_uvwz_on_tan_family(tan_family, rng):
    samples = random_uvwz_samples(rng, tan_family.domain, 100)
    assert identity_uvwz_check(tan_family, samples) <= 1e-9


@pytest.mark.parametrize("gamma", [-1.0, 0.0, 1.0])
def test_identity_uvwz_on_random_families(gamma, rng):
    family = random_families(gamma, draws=1, seed=3)[0]
    assert identity_uvwz_check(family, random_uvwz_samples(rng, family.domain, 1000)) <= 1e-9


def test_identity_uvwz_with_equal_weights_matches_mean(tan_family):
    mf, mg = construct_family(tan_family)
    x, y = np.array([-0.7, 0.2]), np.array([0.4, 1.0])
    t = s = np.ones(2)
    assert identity_uvwz_check(tan_family, (x, y, t, s)) == pytest.approx(
        np.max(np.abs(mf(x, y) + mg(x, y) - x - y)), abs=1e-13)


def test_arithmetic_pair_residuals_vanish():
    mf, mg = catalog.arithmetic_pair()
    report = necessary_residuals(mf, mg, 17)
    assert (report.cond1, report.cond2, report.cond3, report.cond4) == (0.0, 0.0, 0.0, 0.0)
    assert report.delta_fit == 1.0
    system = diagonal_system_check(mf, mg, 17)
    assert (system.first, system.second, system.third, system.fourth) == (0.0, 0.0, 0.0, 0.0)


def test_tan_exp_pair_violates_schwarzian_condition():
    report = necessary_residuals(*catalog.tan_exp_pair(), 33)
    assert report.cond1 < 1e-15
    assert report.cond3 > 0.1
    assert "cond3" in report.failures()


@pytest.mark.parametrize("name, params, domain, gamma", [
    ("tan", (), Interval(-0.5, 0.5), -1.0),
    ("tanh", (), Interval(-1.0, 1.0), 1.0),
    ("identity", (), Interval(-1.0, 1.0), 0.0),
    ("mobius", (2.0, 1.0, 1.0, 3.0), Interval(-1.0, 1.0), 0.0),
])
def test_recover_builtin_ratios(name, params, domain, gamma):
    f = builtins.make_function(name, params, domain)
    pair = recover_uv(f, domain.midpoint)
    assert pair.gamma == pytest.approx(gamma, abs=1e-8)
    assert pair.residual <= 1e-9
    assert wronskian_pair(pair.u, pair.v).wronskian == pytest.approx(f.eval(1, domain.midpoint), rel=1e-12)


def test_recover_tan_gives_sine_and_cosine():
    gamma, u, v = recover_uv(builtins.tan(Interval(-0.5, 0.5)), 0.0)
    assert gamma == pytest.approx(-1.0, abs=1e-12)
    assert (u.a, u.b) == pytest.approx((1.0, 0.0), abs=1e-12)
    assert (v.a, v.b) == pytest.approx((0.0, 1.0), abs=1e-12)
    assert recover_uv(builtins.tan(Interval(-0.5, 0.5)), 0.0).residual < 1e-11


def test_recover_away_from_origin():
    f = builtins.tanh(Interval(-1.0, 3.0))
    pair = recover_uv(f, 2.5)
    assert pair.gamma == pytest.approx(1.0, abs=1e-8)
    assert pair.v(2.5) == pytest.approx(1.0)
    assert pair.u(2.5) == pytest.approx(np.tanh(2.5))
    assert pair.residual <= 1e-9


@pytest.mark.parametrize("gamma", GAMMA_VALUES)
def test_recover_is_a_fixed_point_on_ratio_functions(gamma):
    family = random_families(gamma, draws=1, seed=5)[0]
    u, v, _, _ = family.solutions()
    f = ratio_function(u, v)
    pair = recover_uv(f, 0.3)
    assert pair.gamma == pytest.approx(gamma, abs=1e-8)
    x = family.domain.interior_grid(65)
    np.testing.assert_allclose(pair.u(x) / pair.v(x), u(x) / v(x), rtol=0, atol=1e-9)


def test_recover_rejects_cubic(unit):
    with pytest.raises(NonConstantSchwarzian):
        recover_uv(builtins.cubic(unit), 0.0)


@pytest.mark.parametrize("gamma", GAMMA_VALUES)
def test_classify_confirms_random_families(gamma):
    for family in random_families(gamma):
        mf, mg = construct_family(family)
        verdict = classify_solution(mf, mg, 33)
        assert verdict.confirmed, verdict.label
        assert verdict.gamma == pytest.approx(gamma, abs=1e-8)
        x = family.domain.interior_grid(17)
        c, d = verdict.f_coeffs[2:]
        cz, dz = verdict.g_coeffs[2:]
        vz = GammaSolution(gamma, c, d, family.domain)(x) * GammaSolution(gamma, cz, dz, family.domain)(x)
        np.testing.assert_allclose(vz, mf.p.p1(x) * mg.p.p1(x), rtol=1e-7)


def test_classify_arithmetic_pair():
    verdict = classify_solution(*catalog.arithmetic_pair(), 33)
    assert verdict.confirmed
    assert verdict.gamma == pytest.approx(0.0, abs=1e-12)
    assert verdict.coincidence_fraction == 1.0
    assert verdict.label.startswith("ConfirmedFamily")


def test_classify_rejects_mismatched_schwarzians(unit):
    family = SolutionFamily(-1.0, (1, 0, 0, 1), (1, 0, 0, 1), builtins.exp_rate(0.5, unit),
                            builtins.constant(1.0, unit), unit, g_gamma=1.0)
    mf, mg = construct_family(family)
    verdict = classify_solution(mf, mg, 33)
    assert verdict.kind == "NecessaryFail"
    assert "cond3" in verdict.failed
    assert "cond1" not in verdict.failed and "cond2" not in verdict.failed
    assert verdict.coincidence_fraction < 0.1


@pytest.mark.parametrize("target", invariance.WEIGHT_TARGETS)
def test_classify_rejects_perturbed_weights(target):
    for family in random_families(-1.0, draws=5):
        mf, mg = perturb_weight(*construct_family(family), target, 0.01)
        verdict = classify_solution(mf, mg, 33)
        assert verdict.kind == "NecessaryFail", verdict.label


def test_classify_reports_reconstruction_failure(monkeypatch):
    def refuse(f, x0):
        raise NonConstantSchwarzian("forced")

    monkeypatch.setattr(invariance, "recover_uv", refuse)
    verdict = classify_solution(*catalog.arithmetic_pair(), 17)
    assert verdict.kind == "ReconstructionFail"
    assert "NonConstantSchwarzian" in verdict.reason


def test_classify_reconstruction_tolerance_is_absolute(monkeypatch, tan_family):
    # max |tan| on the domain is about 2.6, so the residual is not scaled by |f|
    real_recover = invariance.recover_uv

    def inflated(f, x0):
        return dataclasses.replace(real_recover(f, x0), residual=3e-9)

    monkeypatch.setattr(invariance, "recover_uv", inflated)
    verdict = classify_solution(*construct_family(tan_family), 33)
    assert verdict.kind == "ReconstructionFail"
    assert "3e-09" in verdict.reason


def test_report_merge_and_failures():
    report = invariance.ResidualReport(grid_size=4, max_invariance=1e-3)
    merged = report.merged(invariance.ResidualReport(grid_size=4, cond1=0.0, cond3=2.0))
    assert merged.max_invariance == 1e-3
    assert merged.failures() == ["invariance", "cond3"]
    assert merged.failures({"invariance": 1e-2, "necessary": 5.0}) == []
