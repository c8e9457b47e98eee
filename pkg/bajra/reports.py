"""Machine-readable reports: one JSON document per CLI run, CSV for grids."""
from __future__ import annotations

import csv
import json
import math
import pathlib
from dataclasses import dataclass, field

import numpy as np

from settings import logger


def finite(value):
    """Recursively replace non-finite floats by None; numpy scalars become Python ones."""
    if isinstance(value, dict):
        return {k: finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class ReportDocument:
    command: str
    spec: dict
    tolerances: dict
    passed: bool = False
    verdict: str = "FAIL"
    residuals: dict = field(default_factory=dict)
    diagonal_checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    error: str | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return finite({
            "command": self.command,
            "spec": self.spec,
            "verdict": self.verdict,
            "passed": self.passed,
            "residuals": self.residuals,
            "diagonal_checks": self.diagonal_checks,
            "details": self.details,
            "tolerances": self.tolerances,
            "error": self.error,
            "wall_time": self.wall_time,
        })

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    def write(self, path):
        path = pathlib.Path(path)
        path.write_text(self.dumps() + "\n", encoding="utf-8")
        logger.info(f"Report written to {path}")


def write_residual_csv(path, X: np.ndarray, Y: np.ndarray, R: np.ndarray):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["x", "y", "residual"])
        for x, y, r in zip(X.ravel(), Y.ravel(), R.ravel()):
            writer.writerow([repr(float(x)), repr(float(y)), repr(float(r))])
    logger.info(f"Per-point residuals written to {path}")
