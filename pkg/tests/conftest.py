import json

import pytest

from bajra import builtins
from bajra.functions import Interval
from bajra.invariance import SolutionFamily
from bajra.sampling import make_rng

UNIT = Interval(-1.0, 1.0)


def spec_dict(gamma=0.0, f_coeffs=(1, 0, 0, 1), g_coeffs=(1, 0, 0, 1), domain=(-1.0, 1.0),
              split1=("constant", [1.0]), split2=("constant", [1.0]), grid=17, **extra) -> dict:
    data = {
        "gamma": gamma,
        "f_coeffs": list(f_coeffs),
        "g_coeffs": list(g_coeffs),
        "domain": list(domain),
        "split1": {"kind": split1[0], "params": split1[1]},
        "split2": {"kind": split2[0], "params": split2[1]},
        "grid": grid,
    }
    data.update(extra)
    return data


@pytest.fixture
def unit():
    return UNIT


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture
def write_spec(tmp_path):
    def write(data, name="family.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def identity_family():
    one = builtins.constant(1.0, UNIT)
    return SolutionFamily(0.0, (1, 0, 0, 1), (1, 0, 0, 1), one, one, UNIT)


@pytest.fixture
def tan_family():
    domain = Interval(-1.2, 1.2)
    cos = builtins.cos(domain)
    return SolutionFamily(-1.0, (1, 0, 0, 1), (1, 0, 0, 1), cos, cos, domain)
