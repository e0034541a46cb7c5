"""Structured verification records and their JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SCHEMA = "gmatrix-report/1"


def to_jsonable(obj):
    """Convert numpy scalars/arrays (and nested containers) to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


@dataclass
class Check:
    """One measured quantity, the bound it is held to, and the verdict.

    ``informational`` checks are logged but never fail a report.
    """

    name: str
    value: Any
    bound: Any
    passed: bool
    data: dict = field(default_factory=dict)
    informational: bool = False

    def as_dict(self):
        return to_jsonable({
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "pass": bool(self.passed),
            "informational": self.informational,
            "data": self.data,
        })


@dataclass
class Report:
    suite: str
    space: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, name, value, bound, passed, informational=False, **data) -> Check:
        check = Check(name, value, bound, bool(passed), data, informational)
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.value, c.bound, c.passed, c.data, c.informational))
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self):
        return [c for c in self.checks if not c.passed and not c.informational]

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self):
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "space": to_jsonable(self.space),
            "checks": [c.as_dict() for c in self.checks],
            "pass": self.passed,
            "meta": to_jsonable(self.meta),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)
