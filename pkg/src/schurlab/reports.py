from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def jsonable(value):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if hasattr(value, "to_json"):
        return value.to_json()
    return value


@dataclass
class CheckReport:
    """Outcome of one randomized or exhaustive check.

    ``worst_margin`` is signed: positive means the claimed inequality held
    with room to spare on every trial.
    """

    check: str
    trials: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def margin(self, value: float) -> None:
        self.worst_margin = min(self.worst_margin, float(value))

    def violate(self, witness: dict | None = None, count: int = 1) -> None:
        self.violations += count
        if self.witness is None and witness is not None:
            self.witness = jsonable(witness)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": jsonable(self.worst_margin),
            "passed": self.passed,
            "witness": self.witness,
            "details": jsonable(self.details),
        }
