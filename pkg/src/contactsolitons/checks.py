"""Sample plans and residual check reports shared by every verification step."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .expr import Chart


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    count: int


@dataclass(frozen=True)
class SamplePlan:
    """Axis-aligned grid per coordinate plus seeded uniform random points.

    Identical seed and grid produce an identical point list; points outside
    the chart domain are dropped (grid) or re-drawn (random)."""

    grid: Mapping[str, GridAxis]
    random_points: int = 25
    seed: int = 42

    def points(self, chart: Chart) -> np.ndarray:
        axes = []
        for name in chart.coords:
            if name not in self.grid:
                raise ValueError(f"sample plan has no grid axis for coordinate {name!r}")
            ax = self.grid[name]
            axes.append(np.linspace(ax.lo, ax.hi, ax.count))
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        kept = [p for p in pts if chart.contains(p)]

        rng = np.random.default_rng(self.seed)
        lo = np.array([self.grid[c].lo for c in chart.coords])
        hi = np.array([self.grid[c].hi for c in chart.coords])
        drawn = 0
        attempts = 0
        max_attempts = 200 * max(self.random_points, 1)
        while drawn < self.random_points and attempts < max_attempts:
            p = lo + (hi - lo) * rng.random(len(chart.coords))
            attempts += 1
            if chart.contains(p):
                kept.append(p)
                drawn += 1
        if drawn < self.random_points:
            raise ValueError(
                "could not draw enough in-domain random points; "
                "check grid bounds against the chart constraints"
            )
        if not kept:
            raise ValueError("sample plan produced no in-domain points")
        return np.array(kept, dtype=float)

    def with_seed(self, seed: int) -> "SamplePlan":
        return SamplePlan(self.grid, self.random_points, seed)

    def to_dict(self) -> dict:
        return {
            "grid": {c: [ax.lo, ax.hi, ax.count] for c, ax in self.grid.items()},
            "random_points": self.random_points,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SamplePlan":
        grid = {
            c: GridAxis(float(v[0]), float(v[1]), int(v[2]))
            for c, v in data["grid"].items()
        }
        return cls(
            grid,
            int(data.get("random_points", 25)),
            int(data.get("seed", 42)),
        )


PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
NOT_APPLICABLE = "not-applicable"


@dataclass
class CheckReport:
    """Per-point residual record with an aggregate verdict.

    ``max_relative`` divides each point's residual by 1 + the magnitude of
    the inputs at that point; the verdict compares it with the tolerance."""

    name: str
    tolerance: float
    status: str = PASS
    max_residual: float = 0.0
    mean_residual: float = 0.0
    max_relative: float = 0.0
    point_residuals: list = field(default_factory=list)
    point_relative: list = field(default_factory=list)
    worst_point: list | None = None
    worst_component: list | None = None
    details: dict = field(default_factory=dict)
    children: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @classmethod
    def from_values(
        cls,
        name: str,
        points: np.ndarray,
        residual_values: Sequence[np.ndarray],
        tolerance: float,
        scales: Sequence[float] | None = None,
        details: dict | None = None,
    ) -> "CheckReport":
        """Build a report from per-point residual component arrays."""
        per_point = []
        worst = (-1.0, None, None)
        for p, vals in zip(points, residual_values):
            arr = np.atleast_1d(np.asarray(vals, dtype=float))
            flat_idx = int(np.argmax(np.abs(arr)))
            r = float(np.abs(arr).flat[flat_idx])
            per_point.append(r)
            if r > worst[0]:
                idx = np.unravel_index(flat_idx, arr.shape)
                worst = (r, [float(v) for v in p], [int(i) for i in idx])
        per_point_arr = np.array(per_point)
        if scales is None:
            scales_arr = np.ones_like(per_point_arr)
        else:
            scales_arr = np.asarray(scales, dtype=float)
        rel = per_point_arr / (1.0 + np.abs(scales_arr))
        max_rel = float(rel.max())
        report = cls(
            name=name,
            tolerance=tolerance,
            status=PASS if max_rel <= tolerance else FAIL,
            max_residual=float(per_point_arr.max()),
            mean_residual=float(per_point_arr.mean()),
            max_relative=max_rel,
            point_residuals=[float(v) for v in per_point_arr],
            point_relative=[float(v) for v in rel],
            worst_point=worst[1],
            worst_component=worst[2],
            details=details or {},
        )
        return report

    @classmethod
    def aggregate(cls, name: str, children: Iterable["CheckReport"], tolerance: float) -> "CheckReport":
        children = list(children)
        judged = [c for c in children if c.status in (PASS, FAIL)]
        status = PASS if all(c.passed for c in judged) else FAIL
        if not judged:
            status = NOT_APPLICABLE
        return cls(
            name=name,
            tolerance=tolerance,
            status=status,
            max_residual=max((c.max_residual for c in judged), default=0.0),
            mean_residual=float(
                np.mean([c.mean_residual for c in judged]) if judged else 0.0
            ),
            max_relative=max((c.max_relative for c in judged), default=0.0),
            children=children,
        )

    @classmethod
    def skipped(cls, name: str, tolerance: float, reason: str) -> "CheckReport":
        return cls(name=name, tolerance=tolerance, status=SKIPPED, details={"reason": reason})

    @classmethod
    def not_applicable(cls, name: str, tolerance: float, reason: str) -> "CheckReport":
        return cls(
            name=name, tolerance=tolerance, status=NOT_APPLICABLE, details={"reason": reason}
        )

    def to_dict(self, include_points: bool = True) -> dict:
        doc = {
            "name": self.name,
            "status": self.status,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "max_relative": self.max_relative,
            "worst_point": self.worst_point,
            "worst_component": self.worst_component,
            "details": self.details,
        }
        if include_points:
            doc["point_residuals"] = self.point_residuals
            doc["point_relative"] = self.point_relative
        if self.children:
            doc["children"] = [c.to_dict(include_points) for c in self.children]
        return doc
