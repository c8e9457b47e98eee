import pytest
from hypothesis import given, settings
from hypothesis.strategies import floats, integers, lists, sampled_from

from bajra.exceptions import NotIndependent, SpecRejected
from bajra.specfile import FamilySpec, load_spec, save_spec
from conftest import spec_dict

finite = floats(-10.0, 10.0, allow_nan=False)


def test_round_trip_with_optional_fields():
    data = spec_dict(gamma=-1.0, split2=("exp", [0.5]), g_gamma=1.0, perturb={"target": "q2", "epsilon": 0.01})
    assert FamilySpec.from_dict(data).to_dict() == data


def test_grid_defaults_to_33():
    data = spec_dict()
    del data["grid"]
    assert FamilySpec.from_dict(data).grid == 33


@settings(deadline=None, max_examples=50)
@given(finite, lists(finite, min_size=4, max_size=4), lists(finite, min_size=4, max_size=4),
       sampled_from(["constant", "exp", "quadratic"]), finite, integers(2, 99))
def test_serialization_is_field_identical(gamma, f_coeffs, g_coeffs, kind, param, grid):
    data = spec_dict(gamma, f_coeffs, g_coeffs, split1=(kind, [param]), grid=grid)
    spec = FamilySpec.from_dict(data)
    assert spec.to_dict() == data
    assert FamilySpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("change, invariant", [
    ({"f_coeffs": [1, 0, 0]}, "f_coeffs"),
    ({"g_coeffs": "1 0 0 1"}, "g_coeffs"),
    ({"gamma": "one"}, "gamma"),
    ({"gamma": True}, "gamma"),
    ({"domain": [1.0, -1.0]}, "domain"),
    ({"split1": {"kind": "sine", "params": [1.0]}}, "split1.kind"),
    ({"split2": {"kind": "exp", "params": [1.0, 2.0]}}, "params"),
    ({"grid": 1}, "grid"),
    ({"perturb": {"target": "r1", "epsilon": 0.1}}, "perturb.target"),
])
def test_rejections_name_the_invariant(change, invariant):
    data = {**spec_dict(), **change}
    with pytest.raises(SpecRejected) as excinfo:
        FamilySpec.from_dict(data)
    assert excinfo.value.invariant == invariant


def test_missing_field_is_rejected():
    data = spec_dict()
    del data["split2"]
    with pytest.raises(SpecRejected) as excinfo:
        FamilySpec.from_dict(data)
    assert excinfo.value.invariant == "split2"


def test_dependent_spec_builds_to_rejection():
    spec = FamilySpec.from_dict(spec_dict(f_coeffs=(1, 2, 2, 4)))
    with pytest.raises(NotIndependent):
        spec.build()


def test_perturbed_spec_changes_one_weight():
    plain = FamilySpec.from_dict(spec_dict(split1=("exp", [0.5])))
    perturbed = FamilySpec.from_dict(spec_dict(split1=("exp", [0.5]), perturb={"target": "p2", "epsilon": 0.5}))
    mf, mg = plain.build()
    pf, pg = perturbed.build()
    assert pf.p.p1(0.5) == pytest.approx(mf.p.p1(0.5))
    assert pf.p.p2(0.5) == pytest.approx(1.125 * mf.p.p2(0.5))
    assert pg.p.p1(0.5) == pytest.approx(mg.p.p1(0.5))


def test_load_and_save(tmp_path, write_spec):
    spec = load_spec(write_spec(spec_dict(gamma=0.25)))
    path = tmp_path / "copy.json"
    save_spec(spec, path)
    assert load_spec(path) == spec


def test_load_rejects_broken_files(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(SpecRejected) as excinfo:
        load_spec(broken)
    assert excinfo.value.invariant == "json"
    with pytest.raises(SpecRejected) as excinfo:
        load_spec(tmp_path / "missing.json")
    assert excinfo.value.invariant == "file"
