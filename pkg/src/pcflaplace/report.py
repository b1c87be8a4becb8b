"""Verification report shared by the pair sweeps and the Monte Carlo checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = "1.0"


@dataclass
class CheckPoint:
    """One residual at one grid point.

    ``kind`` names the check (``forward``, ``inverse``, ``cross``, ``ks``,
    ``histogram`` ...), ``coords`` holds the grid coordinates, and
    ``residual`` is compared against ``tolerance``.
    """

    kind: str
    coords: dict
    value: float
    reference: float
    residual: float
    tolerance: float
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "coords": dict(self.coords),
            "value": _jsonable(self.value),
            "reference": _jsonable(self.reference),
            "residual": _jsonable(self.residual),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "error": self.error,
        }


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        return str(x)
    return x


@dataclass
class VerificationReport:
    """Residuals for one subject (a transform pair or an OU check).

    ``passed`` holds exactly when every point is within its tolerance.
    """

    pair_id: str
    provenance: str
    points: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.points) and all(p.passed for p in self.points)

    def worst(self, kind: str | None = None) -> float:
        """Largest residual/tolerance ratio, optionally for one kind of check."""
        ratios = [p.residual / p.tolerance if p.error is None else float("inf")
                  for p in self.points if kind is None or p.kind == kind]
        return max(ratios) if ratios else 0.0

    def failures(self) -> list:
        return [p for p in self.points if not p.passed]

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "pair_id": self.pair_id,
            "provenance": self.provenance,
            "passed": self.passed,
            "points": [p.to_dict() for p in self.points],
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)

    def csv_rows(self) -> list:
        """One row per grid point: id, kind, coordinates, residual, tolerance, passed."""
        rows = []
        for i, p in enumerate(self.points):
            coords = ";".join(f"{k}={p.coords[k]}" for k in sorted(p.coords))
            rows.append([self.pair_id, i, p.kind, coords, repr(_jsonable(p.residual)),
                         repr(p.tolerance), int(p.passed)])
        return rows


CSV_HEADER = ["pair_id", "index", "kind", "coords", "residual", "tolerance", "passed"]
