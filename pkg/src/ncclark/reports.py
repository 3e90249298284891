"""Structured check reports shared by the command line and the acceptance suite.

A report is ``{schemaVersion, check, inputs, convention, residuals, verdict, data}``.
Each residual records a value, a tolerance and the direction of the
comparison, so the report alone decides pass or fail.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .states import CONVENTION

SCHEMA_VERSION = 1

OK, FAILED, INCONCLUSIVE = "ok", "failed", "inconclusive"


def jsonable(x: Any) -> Any:
    """Convert numpy scalars, arrays and complex numbers to plain JSON values.

    Complex numbers become ``[re, im]``; non-finite floats become ``None``.
    """
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


@dataclass
class Residual:
    value: Optional[float]
    tolerance: Optional[float]
    direction: str = "max"  # "max": value <= tolerance; "min": value >= tolerance
    note: Optional[str] = None

    @property
    def passed(self) -> bool:
        if self.tolerance is None:
            return True
        if self.value is None or not math.isfinite(self.value):
            return False
        if self.direction == "max":
            return self.value <= self.tolerance
        return self.value >= self.tolerance

    def to_json(self) -> dict:
        out = {
            "value": jsonable(self.value),
            "tolerance": self.tolerance,
            "direction": self.direction,
            "pass": self.passed,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    check: str
    inputs: dict = field(default_factory=dict)
    convention: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    verdict: Optional[str] = None
    inconclusive: bool = False
    errors: list = field(default_factory=list)

    def residual(self, name: str, value, tolerance: Optional[float], direction: str = "max",
                 note: Optional[str] = None) -> Residual:
        r = Residual(None if value is None else float(value), tolerance, direction, note)
        self.residuals[name] = r
        return r

    def error(self, name: str, exc: BaseException) -> None:
        """Record a check that could not run; it counts as failed."""
        self.errors.append({"check": name, "type": type(exc).__name__, "message": str(exc)})

    @property
    def status(self) -> str:
        if self.errors or not all(r.passed for r in self.residuals.values()):
            return FAILED
        if self.inconclusive:
            return INCONCLUSIVE
        return OK

    def exit_code(self) -> int:
        return {OK: 0, INCONCLUSIVE: 2, FAILED: 1}[self.status]

    def to_json(self) -> dict:
        conv = dict(CONVENTION)
        conv.update(self.convention)
        out = {
            "schemaVersion": SCHEMA_VERSION,
            "check": self.check,
            "inputs": jsonable(self.inputs),
            "convention": jsonable(conv),
            "residuals": {k: v.to_json() for k, v in self.residuals.items()},
            "verdict": self.verdict,
            "status": self.status,
            "data": jsonable(self.data),
        }
        if self.errors:
            out["errors"] = self.errors
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def merge(self, prefix: str, other: "Report") -> None:
        """Fold a sub-report into this one under ``prefix``."""
        for k, v in other.residuals.items():
            self.residuals[f"{prefix}.{k}"] = v
        for e in other.errors:
            self.errors.append({**e, "check": f"{prefix}.{e['check']}"})
        self.inconclusive = self.inconclusive or other.inconclusive
        self.data[prefix] = {"verdict": other.verdict, **other.data}
        for k, v in other.convention.items():
            self.convention.setdefault(k, v)
