"""Command-line entry point.

Commands: ``validate``, ``curvature``, ``check-soliton``, ``verify-paper``.
Reports are emitted as JSON (default) or CSV.  Exit codes: 0 all checks
pass, 1 at least one check failed, 2 input or parse error."""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import sys

import numpy as np

from . import __version__, specfile, verify, zoo
from .checks import CheckReport, GridAxis, SamplePlan
from .contact import StructureError, validate_structure
from .expr import DomainError, ExpressionError
from .geometry import GeometryError, riemann, weyl
from .soliton import (
    SolitonError,
    collinear_lemma_checks,
    contracted_identity_checks,
    contraction_coherence,
    multi_soliton_consistency,
    quasi_einstein_decompose,
    solve_lambda_pointwise,
    soliton_residual,
    symmetry_condition_residuals,
    transfer_riemann_to_ricci,
)
from .specfile import SpecFileError
from .tensor import TensorError, frame_project
from .zoo import ZooError

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


class CliInputError(Exception):
    pass


def _parse_grid(text: str) -> dict[str, GridAxis]:
    axes = {}
    for part in text.split(","):
        try:
            name, spec = part.split("=")
            lo, hi, count = spec.split(":")
            axes[name.strip()] = GridAxis(float(lo), float(hi), int(count))
        except ValueError as exc:
            raise CliInputError(
                f"bad --grid entry {part!r}; expected name=lo:hi:count"
            ) from exc
    return axes


def _load_entry(args) -> zoo.ZooEntry:
    if args.zoo and args.spec:
        raise CliInputError("give either --zoo NAME or a spec file, not both")
    if args.zoo:
        try:
            entry = zoo.load(args.zoo)
        except ZooError as exc:
            raise CliInputError(str(exc)) from exc
    elif args.spec:
        entry = specfile.load(args.spec)
    else:
        raise CliInputError("give --zoo NAME or a spec file path")
    plan = entry.plan
    grid = dict(plan.grid)
    if args.grid:
        grid.update(_parse_grid(args.grid))
    plan = SamplePlan(
        grid,
        args.samples if args.samples is not None else plan.random_points,
        args.seed if args.seed is not None else plan.seed,
    )
    # zoo.load caches entries; never mutate the shared instance, and drop
    # the plan-dependent profile cache on the copy
    entry = copy.copy(entry)
    entry.plan = plan
    entry._profile = None
    return entry


def _document(args, entry_name: str, checks: list[CheckReport], extra: dict | None = None) -> dict:
    judged = [c for c in checks if c.status in ("pass", "fail")]
    verdict = "pass" if all(c.passed for c in judged) else "fail"
    doc = {
        "tool": "contactsolitons",
        "version": __version__,
        "input": entry_name,
        "tolerance": args.tol,
        "seed": args.seed,
        "samples": args.samples,
        "checks": [c.to_dict() for c in checks],
        "verdict": verdict,
    }
    if extra:
        doc.update(extra)
    return doc


def _flatten(check: dict, prefix: str = ""):
    name = prefix + check["name"]
    yield name, check
    for child in check.get("children", []):
        yield from _flatten(child, name + "/")


def _emit(doc: dict, args) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["check", "status", "max_residual", "max_relative", "tolerance"])
        for check in doc["checks"]:
            for name, c in _flatten(check):
                writer.writerow(
                    [name, c["status"], c["max_residual"], c["max_relative"], c["tolerance"]]
                )
        text = buf.getvalue()
    else:
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    entry = _load_entry(args)
    if entry.structure is None:
        raise CliInputError("input has no contact structure block to validate")
    checks = [validate_structure(entry.structure, entry.plan, args.tol)]
    extra = {}
    try:
        profile = entry.profile()
        fit = CheckReport.from_values(
            "alpha-beta-fit",
            profile.points,
            [np.array([r]) for r in profile.fit_residuals],
            max(args.tol, 1e-8),
        )
        extra["classification"] = profile.class_tag
        extra["alpha_range"] = [float(profile.alpha_values.min()), float(profile.alpha_values.max())]
        extra["beta_range"] = [float(profile.beta_values.min()), float(profile.beta_values.max())]
        checks.append(fit)
    except StructureError as exc:
        fail = CheckReport(name="alpha-beta-fit", tolerance=args.tol, status="fail",
                           details={"error": str(exc)})
        checks.append(fail)
    doc = _document(args, entry.name, checks, extra)
    _emit(doc, args)
    return EXIT_PASS if doc["verdict"] == "pass" else EXIT_FAIL


def _frame_tables(entry, bundle) -> dict:
    p = entry.plan.points(entry.chart)[0]
    g = entry.metric
    gm = g.matrix_at(p)
    fr = g.frame_at(p)
    w = weyl(bundle)
    tables = {
        "point": [float(v) for v in p],
        "christoffel": bundle.connection.evaluate(p).tolist(),
        "riemann": frame_project(
            bundle.riemann_low.evaluate(p), bundle.riemann_low.variance, gm, fr
        ).tolist(),
        "ricci": frame_project(bundle.ricci.evaluate(p), ("d", "d"), gm, fr).tolist(),
        "scal": bundle.scalar.evaluate(p),
        "weyl": frame_project(w.evaluate(p), w.variance, gm, fr).tolist(),
    }
    return tables


def cmd_curvature(args) -> int:
    entry = _load_entry(args)
    bundle = riemann(entry.metric)
    checks = [verify.curvature_invariant_suite(entry)]
    extra = {}
    if args.frame:
        extra["frame_tables"] = _frame_tables(entry, bundle)
    doc = _document(args, entry.name, checks, extra)
    _emit(doc, args)
    return EXIT_PASS if doc["verdict"] == "pass" else EXIT_FAIL


def cmd_check_soliton(args) -> int:
    entry = _load_entry(args)
    if entry.structure is None:
        raise CliInputError("soliton checks need a contact structure block")
    if args.candidate:
        selected = [entry.candidate(args.candidate)]
    elif args.all:
        selected = list(entry.candidates)
    else:
        raise CliInputError("give --candidate NAME or --all")
    if not selected:
        raise CliInputError("no soliton candidates on this input")
    s = entry.structure
    g = entry.metric
    conn = entry.connection()
    bundle = riemann(g)
    profile = entry.profile()
    plan = entry.plan
    checks: list[CheckReport] = []
    for c in selected:
        checks.append(soliton_residual(c, g, bundle, plan, entry.chart, args.tol))
        if args.solve_lambda:
            lambdas, rep = solve_lambda_pointwise(
                c.kind, c.v, g, bundle, plan, entry.chart, args.tol
            )
            rep.name = f"{c.name}:solve-lambda"
            rep.details["lambda_range"] = [float(lambdas.min()), float(lambdas.max())]
            checks.append(rep)
        if c.collinear and profile.alpha is not None:
            checks.append(collinear_lemma_checks(c, s, profile, conn, plan, args.tol))
        checks.append(contracted_identity_checks(c, s, profile, bundle, conn, plan, args.tol))
        if c.kind == "riemann":
            _, transfer_rep = transfer_riemann_to_ricci(
                c, s, bundle, conn, plan, profile, args.tol
            )
            checks.append(transfer_rep)
            checks.append(contraction_coherence(c, s, bundle, conn, plan, args.tol))
    _, _, qe = quasi_einstein_decompose(bundle, s, plan, args.tol)
    checks.append(qe)
    checks.append(symmetry_condition_residuals(bundle, s, profile, conn, plan,
                                               candidate=selected[0], tolerance=args.tol))
    checks.append(multi_soliton_consistency(selected, s, profile, bundle, plan, args.tol))
    doc = _document(args, entry.name, checks)
    _emit(doc, args)
    return EXIT_PASS if doc["verdict"] == "pass" else EXIT_FAIL


def cmd_verify_paper(args) -> int:
    args.zoo, args.spec = "paper-kenmotsu", None
    entry = _load_entry(args)
    checks = verify.paper_claim_reports(entry, entry.plan, args.tol)
    checks.append(verify.curvature_invariant_suite(entry))
    doc = _document(args, entry.name, checks)
    if args.format == "table":
        lines = []
        for c in checks:
            lines.append(f"{c.status.upper():5s}  {c.name:30s}  max-residual {c.max_residual:.3e}")
        lines.append(f"verdict: {doc['verdict']}")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(doc, args)
    return EXIT_PASS if doc["verdict"] == "pass" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactsolitons",
        description="Check contact metric structures, curvature and soliton equations "
        "on chart-defined manifolds.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec_input=True):
        if spec_input:
            p.add_argument("spec", nargs="?", help="manifold spec file (JSON)")
            p.add_argument("--zoo", help="built-in manifold name")
        p.add_argument("--tol", type=float, default=1e-9, help="residual tolerance")
        p.add_argument("--seed", type=int, default=None, help="random-sample seed")
        p.add_argument("--samples", type=int, default=None, help="number of random points")
        p.add_argument("--grid", help="per-axis grid override, e.g. x=-1:1:5,z=1.1:2:5")
        p.add_argument("--format", choices=["json", "csv", "table"], default="json")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("validate", help="structure axioms and the (alpha, beta) fit")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("curvature", help="curvature identity suite and tables")
    common(p)
    p.add_argument("--frame", action="store_true", help="include frame-projected tables")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("check-soliton", help="soliton residuals and derived identities")
    common(p)
    p.add_argument("--candidate", help="check one named candidate")
    p.add_argument("--all", action="store_true", help="check every candidate")
    p.add_argument("--solve-lambda", action="store_true",
                   help="recover the best lambda per point")
    p.set_defaults(func=cmd_check_soliton)

    p = sub.add_parser("verify-paper", help="golden suite over the built-in Kenmotsu example")
    common(p, spec_input=False)
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "zoo"):
        args.zoo, args.spec = None, None
    try:
        return args.func(args)
    except (
        CliInputError,
        SpecFileError,
        ExpressionError,
        DomainError,
        ZooError,
        StructureError,
        SolitonError,
        TensorError,
        GeometryError,
        FileNotFoundError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
