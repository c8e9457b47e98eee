"""JSON family specifications.

    {
      "gamma": -1.0,
      "f_coeffs": [1, 0, 0, 1],
      "g_coeffs": [1, 0, 0, 1],
      "domain": [-1.2, 1.2],
      "split1": {"kind": "constant", "params": [1.0]},
      "split2": {"kind": "exp", "params": [0.5]},
      "grid": 33
    }

Optional keys: "g_gamma" (a different equation for the g-side) and
"perturb" ({"target": "p1" | "p2" | "q1" | "q2", "epsilon": float}).
"""
from __future__ import annotations

import json
import math
import pathlib
from dataclasses import dataclass

from bajra import builtins
from bajra.exceptions import BajraError, SpecRejected
from bajra.functions import Interval
from bajra.invariance import WEIGHT_TARGETS, SolutionFamily, construct_family, perturb_weight
from bajra.means import BajraktarevicMean
from settings import logger

DEFAULT_GRID = 33


def _real(data: dict, key: str) -> float:
    value = data.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SpecRejected(key, f"expected a finite number, got {value!r}")
    return float(value)


def _reals(data: dict, key: str, length: int) -> list[float]:
    value = data.get(key)
    if not isinstance(value, list) or len(value) != length:
        raise SpecRejected(key, f"expected a list of {length} numbers, got {value!r}")
    return [_real({key: item}, key) for item in value]


@dataclass(frozen=True)
class SplitSpec:
    kind: str
    params: list[float]

    @classmethod
    def from_dict(cls, data, key: str) -> "SplitSpec":
        if not isinstance(data, dict):
            raise SpecRejected(key, f"expected an object with kind and params, got {data!r}")
        kind = data.get("kind")
        if kind not in builtins.SPLITS:
            raise SpecRejected(f"{key}.kind", f"unknown split {kind!r}; known: {', '.join(builtins.SPLITS)}")
        arity = builtins.SPLITS[kind][0]
        return cls(kind, _reals(data, "params", arity))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


@dataclass(frozen=True)
class Perturbation:
    target: str
    epsilon: float

    @classmethod
    def from_dict(cls, data) -> "Perturbation":
        if not isinstance(data, dict) or data.get("target") not in WEIGHT_TARGETS:
            raise SpecRejected("perturb.target", f"expected one of {WEIGHT_TARGETS}, got {data!r}")
        return cls(data["target"], _real(data, "epsilon"))

    def to_dict(self) -> dict:
        return {"target": self.target, "epsilon": self.epsilon}


@dataclass(frozen=True)
class FamilySpec:
    gamma: float
    f_coeffs: list[float]
    g_coeffs: list[float]
    domain: list[float]
    split1: SplitSpec
    split2: SplitSpec
    grid: int = DEFAULT_GRID
    g_gamma: float | None = None
    perturb: Perturbation | None = None

    @classmethod
    def from_dict(cls, data) -> "FamilySpec":
        if not isinstance(data, dict):
            raise SpecRejected("document", "a family spec must be a JSON object")
        grid = data.get("grid", DEFAULT_GRID)
        if isinstance(grid, bool) or not isinstance(grid, int) or grid < 2:
            raise SpecRejected("grid", f"expected an integer >= 2, got {grid!r}")
        domain = _reals(data, "domain", 2)
        if not domain[0] < domain[1]:
            raise SpecRejected("domain", f"lower end must be below upper end, got {domain}")
        return cls(
            gamma=_real(data, "gamma"),
            f_coeffs=_reals(data, "f_coeffs", 4),
            g_coeffs=_reals(data, "g_coeffs", 4),
            domain=domain,
            split1=SplitSpec.from_dict(data.get("split1"), "split1"),
            split2=SplitSpec.from_dict(data.get("split2"), "split2"),
            grid=grid,
            g_gamma=_real(data, "g_gamma") if "g_gamma" in data else None,
            perturb=Perturbation.from_dict(data["perturb"]) if "perturb" in data else None,
        )

    def to_dict(self) -> dict:
        data = {
            "gamma": self.gamma,
            "f_coeffs": list(self.f_coeffs),
            "g_coeffs": list(self.g_coeffs),
            "domain": list(self.domain),
            "split1": self.split1.to_dict(),
            "split2": self.split2.to_dict(),
            "grid": self.grid,
        }
        if self.g_gamma is not None:
            data["g_gamma"] = self.g_gamma
        if self.perturb is not None:
            data["perturb"] = self.perturb.to_dict()
        return data

    @property
    def interval(self) -> Interval:
        return Interval(*self.domain)

    def to_family(self) -> SolutionFamily:
        domain = self.interval
        return SolutionFamily(
            gamma=self.gamma,
            f_coeffs=tuple(self.f_coeffs),
            g_coeffs=tuple(self.g_coeffs),
            split1=builtins.make_split(self.split1.kind, self.split1.params, domain),
            split2=builtins.make_split(self.split2.kind, self.split2.params, domain),
            domain=domain,
            g_gamma=self.g_gamma,
        )

    def build(self) -> tuple[BajraktarevicMean, BajraktarevicMean]:
        """The pair of means, perturbed when the spec asks for it."""
        mf, mg = construct_family(self.to_family())
        if self.perturb is not None:
            mf, mg = perturb_weight(mf, mg, self.perturb.target, self.perturb.epsilon)
        return mf, mg


def load_spec(path) -> FamilySpec:
    path = pathlib.Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise SpecRejected("file", f"{path} does not exist") from e
    except json.JSONDecodeError as e:
        raise SpecRejected("json", f"{path}: {e}") from e
    spec = FamilySpec.from_dict(data)
    logger.debug(f"Loaded family spec {path.name}: gamma={spec.gamma:g}")
    return spec


def save_spec(spec: FamilySpec, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(spec.to_dict(), f, indent=2)
