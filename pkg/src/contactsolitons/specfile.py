"""Manifold spec files: JSON documents with expression strings.

The loader builds the same ZooEntry structure the built-in zoo produces, so
every check runs identically on files and on built-ins.  The exporter
round-trips a zoo entry at the expression-text level."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import sympy as sp

from .checks import SamplePlan
from .contact import AlmostContactStructure
from .expr import Chart, ExpressionError, ScalarExpr
from .soliton import SolitonCandidate
from .tensor import MetricField, TensorField
from .zoo import ZooEntry


class SpecFileError(ValueError):
    """Unparseable spec file or a failed structural validation."""


def _parse_matrix(chart: Chart, rows, variance: str, what: str) -> TensorField:
    m = chart.dim
    arr = np.asarray(rows, dtype=object)
    if arr.shape != (m,) * len(variance):
        raise SpecFileError(f"{what} must be a {'x'.join([str(m)] * len(variance))} array")
    try:
        return TensorField.from_strings(chart.coords, variance, arr)
    except ExpressionError as exc:
        raise SpecFileError(f"in {what}: {exc}") from exc


def _check_metric_symmetry(chart: Chart, g: MetricField, plan: SamplePlan) -> None:
    pts = plan.points(chart)
    for p in pts[: min(len(pts), 10)]:
        gm = g.matrix_at(p)
        if float(np.abs(gm - gm.T).max()) > 1e-10:
            raise SpecFileError(
                f"metric is not symmetric at sample point {list(p)}"
            )


def load_dict(doc: dict) -> ZooEntry:
    try:
        coords = list(doc["coordinates"])
        dimension = int(doc["dimension"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFileError(f"missing or malformed header field: {exc}") from exc
    if len(coords) != dimension:
        raise SpecFileError("dimension does not match the coordinate list")
    try:
        chart = Chart(coords, doc.get("domain", []))
    except ExpressionError as exc:
        raise SpecFileError(str(exc)) from exc

    metric = MetricField(_parse_matrix(chart, doc["metric"], "dd", "metric"))
    plan = (
        SamplePlan.from_dict(doc["sample_plan"])
        if "sample_plan" in doc
        else _default_plan(chart)
    )
    _check_metric_symmetry(chart, metric, plan)

    structure = None
    if "structure" in doc:
        block = doc["structure"]
        phi = _parse_matrix(chart, block["phi"], "ud", "phi")
        xi = _parse_matrix(chart, block["xi"], "u", "xi")
        eta = _parse_matrix(chart, block["eta"], "d", "eta")
        structure = AlmostContactStructure(chart, phi, xi, eta, metric)

    def parse_scalar(key, default=None):
        if key not in doc:
            return default
        try:
            return chart.parse(str(doc[key]))
        except ExpressionError as exc:
            raise SpecFileError(f"in {key}: {exc}") from exc

    alpha = parse_scalar("alpha")
    beta = parse_scalar("beta")

    candidates = []
    for item in doc.get("candidates", []):
        try:
            v = _parse_matrix(chart, item["V"], "u", f"candidate {item.get('name')} V")
            lam = chart.parse(str(item["lambda"]))
            candidates.append(
                SolitonCandidate(
                    name=str(item["name"]),
                    v=v,
                    lam=lam,
                    kind=str(item["kind"]).lower(),
                    collinear=bool(item.get("collinear", False)),
                )
            )
        except (KeyError, ExpressionError, ValueError) as exc:
            raise SpecFileError(f"malformed candidate entry: {exc}") from exc

    frame = None
    if "frame" in doc:
        frame = [
            _parse_matrix(chart, row, "u", f"frame vector {i}")
            for i, row in enumerate(doc["frame"])
        ]

    return ZooEntry(
        name=str(doc.get("name", "spec-file")),
        chart=chart,
        metric=metric,
        structure=structure,
        alpha=alpha,
        beta=beta,
        candidates=candidates,
        plan=plan,
        frame=frame,
    )


def _default_plan(chart: Chart) -> SamplePlan:
    from .checks import GridAxis

    return SamplePlan({c: GridAxis(-1.0, 1.0, 3) for c in chart.coords}, 25, 42)


def load(path: str | Path) -> ZooEntry:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecFileError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SpecFileError(f"{path}: spec file must be a JSON object")
    return load_dict(doc)


def _matrix_text(t: TensorField):
    def render(idx):
        return sp.sstr(t.comps[idx])

    shape = t.comps.shape
    if len(shape) == 1:
        return [render((i,)) for i in range(shape[0])]
    return [
        [render((i, j)) for j in range(shape[1])] for i in range(shape[0])
    ]


def export_dict(entry: ZooEntry) -> dict:
    doc = {
        "name": entry.name,
        "dimension": entry.chart.dim,
        "coordinates": list(entry.chart.coords),
        "domain": list(entry.chart.constraint_texts),
        "metric": _matrix_text(entry.metric.tensor),
        "sample_plan": entry.plan.to_dict(),
    }
    if entry.structure is not None:
        doc["structure"] = {
            "phi": _matrix_text(entry.structure.phi),
            "xi": _matrix_text(entry.structure.xi),
            "eta": _matrix_text(entry.structure.eta),
        }
    if entry.alpha is not None:
        doc["alpha"] = entry.alpha.text()
    if entry.beta is not None:
        doc["beta"] = entry.beta.text()
    if entry.frame is not None:
        doc["frame"] = [_matrix_text(v) for v in entry.frame]
    doc["candidates"] = [
        {
            "name": c.name,
            "V": _matrix_text(c.v),
            "lambda": c.lam.text(),
            "kind": c.kind,
            "collinear": c.collinear,
        }
        for c in entry.candidates
    ]
    return doc


def export(entry: ZooEntry, path: str | Path) -> None:
    Path(path).write_text(json.dumps(export_dict(entry), indent=2) + "\n")
