"""Residual evaluation for Riemann / Ricci / Yamabe soliton candidates and
every identity derived from them for potentials collinear with xi.

All residual norms are frame-projected: tensors are evaluated in the
coordinate frame, lowered, and contracted with the orthonormal frame obtained
from the metric at each sample point (Cholesky, i.e. Gram-Schmidt on the
coordinate vectors)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .checks import CheckReport, SamplePlan
from .contact import AlmostContactStructure, AlphaBetaProfile
from .expr import Chart, ScalarExpr
from .geometry import (
    Connection,
    CurvatureBundle,
    covariant_derivative,
    curvature_action_on_ric,
    directional_derivative,
    divergence,
    gradient,
)
from .tensor import (
    CONTRA,
    COV,
    MetricField,
    TensorField,
    frame_project,
    kulkarni_nomizu,
    lie_derivative,
    outer,
)

KINDS = ("riemann", "ricci", "yamabe")


class SolitonError(ValueError):
    pass


@dataclass
class SolitonCandidate:
    """A potential vector field, a soliton function and an equation kind."""

    name: str
    v: TensorField            # (u,)
    lam: ScalarExpr
    kind: str
    collinear: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SolitonError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.v.variance != (CONTRA,):
            raise SolitonError("potential must be a contravariant rank-1 field")


def eta_of(v: TensorField, s: AlmostContactStructure) -> ScalarExpr:
    """eta(V) as a scalar expression."""
    total = sp.Integer(0)
    for i in range(v.m):
        total += s.eta.comps[i] * v.comps[i]
    return ScalarExpr(sp.cancel(total), v.coords)


def check_collinear(
    c: SolitonCandidate, s: AlmostContactStructure, plan: SamplePlan, tolerance: float = 1e-10
) -> CheckReport:
    """|V - eta(V) xi| componentwise at all sample points."""
    points = plan.points(s.chart)
    ev = eta_of(c.v, s)
    values = []
    for p in points:
        values.append(c.v.evaluate(p) - ev.evaluate(p) * s.xi.evaluate(p))
    return CheckReport.from_values(f"{c.name}:collinearity", points, values, tolerance)


# -- residual tensors ------------------------------------------------------


def _riemann_residual_field(c: SolitonCandidate, g: MetricField, bundle: CurvatureBundle):
    """(0,4) residual of  1/2 (L_V g) o g + R - lambda * 1/2 (g o g)."""
    lvg = lie_derivative(c.v, g.tensor)
    lhs = kulkarni_nomizu(lvg, g.tensor).scale(sp.Rational(1, 2)) + bundle.riemann_low
    gg = kulkarni_nomizu(g.tensor, g.tensor)
    rhs = gg.scale(c.lam.sym / 2)
    parts = [lhs, rhs]
    return lhs - rhs, parts


def _ricci_residual_field(c: SolitonCandidate, g: MetricField, bundle: CurvatureBundle):
    """(0,2) residual of  1/2 L_V g + Ric - lambda g."""
    lvg = lie_derivative(c.v, g.tensor)
    lhs = lvg.scale(sp.Rational(1, 2)) + bundle.ricci
    rhs = g.tensor.scale(c.lam.sym)
    return lhs - rhs, [lhs, rhs]


def _yamabe_residual_field(c: SolitonCandidate, g: MetricField, bundle: CurvatureBundle):
    """(0,2) residual of  L_V g - (lambda - scal) g."""
    lvg = lie_derivative(c.v, g.tensor)
    rhs = g.tensor.scale(c.lam.sym - bundle.scalar.sym)
    return lvg - rhs, [lvg, rhs]


_RESIDUAL_FIELDS = {
    "riemann": _riemann_residual_field,
    "ricci": _ricci_residual_field,
    "yamabe": _yamabe_residual_field,
}


def _frame_report(
    name: str,
    residual: TensorField,
    parts: list[TensorField],
    g: MetricField,
    chart: Chart,
    plan: SamplePlan,
    tolerance: float,
    details: dict | None = None,
) -> CheckReport:
    points = plan.points(chart)
    values, scales = [], []
    for p in points:
        gm = g.matrix_at(p)
        fr = g.frame_at(p)
        values.append(frame_project(residual.evaluate(p), residual.variance, gm, fr))
        scale = 0.0
        for part in parts:
            scale = max(
                scale,
                float(np.abs(frame_project(part.evaluate(p), part.variance, gm, fr)).max()),
            )
        scales.append(scale)
    return CheckReport.from_values(name, points, values, tolerance, scales, details=details)


def soliton_residual(
    c: SolitonCandidate,
    g: MetricField,
    bundle: CurvatureBundle,
    plan: SamplePlan,
    chart: Chart,
    tolerance: float = 1e-9,
) -> CheckReport:
    """Residual report for the candidate's own soliton equation."""
    residual, parts = _RESIDUAL_FIELDS[c.kind](c, g, bundle)
    return _frame_report(
        f"{c.name}:{c.kind}-soliton", residual, parts, g, chart, plan, tolerance
    )


def riemann_soliton_residual(c, g, bundle, plan, chart, tolerance=1e-9):
    if c.kind != "riemann":
        raise SolitonError("candidate kind must be 'riemann'")
    return soliton_residual(c, g, bundle, plan, chart, tolerance)


def ricci_soliton_residual(c, g, bundle, plan, chart, tolerance=1e-9):
    if c.kind != "ricci":
        raise SolitonError("candidate kind must be 'ricci'")
    return soliton_residual(c, g, bundle, plan, chart, tolerance)


def yamabe_soliton_residual(c, g, bundle, plan, chart, tolerance=1e-9):
    if c.kind != "yamabe":
        raise SolitonError("candidate kind must be 'yamabe'")
    return soliton_residual(c, g, bundle, plan, chart, tolerance)


# -- pointwise lambda recovery ---------------------------------------------


def solve_lambda_pointwise(
    kind: str,
    v: TensorField,
    g: MetricField,
    bundle: CurvatureBundle,
    plan: SamplePlan,
    chart: Chart,
    tolerance: float = 1e-9,
):
    """Best lambda per point (least squares) and the irreducible residual.

    Returns (lambda samples, CheckReport); the report passes iff an almost
    soliton with this potential exists within tolerance."""
    if kind not in KINDS:
        raise SolitonError(f"kind must be one of {KINDS}")
    lvg = lie_derivative(v, g.tensor)
    if kind == "riemann":
        a_field = kulkarni_nomizu(lvg, g.tensor).scale(sp.Rational(1, 2)) + bundle.riemann_low
        b_field = kulkarni_nomizu(g.tensor, g.tensor).scale(sp.Rational(1, 2))
    elif kind == "ricci":
        a_field = lvg.scale(sp.Rational(1, 2)) + bundle.ricci
        b_field = g.tensor
    else:
        a_field = lvg + g.tensor.scale(bundle.scalar.sym)
        b_field = g.tensor
    points = plan.points(chart)
    lambdas, values, scales = [], [], []
    for p in points:
        gm = g.matrix_at(p)
        fr = g.frame_at(p)
        av = frame_project(a_field.evaluate(p), a_field.variance, gm, fr)
        bv = frame_project(b_field.evaluate(p), b_field.variance, gm, fr)
        denom = float((bv * bv).sum())
        if denom < 1e-14:
            raise SolitonError(f"lambda coefficient tensor vanishes at {list(p)}")
        lam = float((av * bv).sum()) / denom
        lambdas.append(lam)
        values.append(av - lam * bv)
        scales.append(max(float(np.abs(av).max()), float(np.abs(lam * bv).max())))
    report = CheckReport.from_values(
        f"solve-lambda:{kind}", points, values, tolerance, scales
    )
    return np.array(lambdas), report


# -- collinear lemma -------------------------------------------------------


def collinear_lemma_checks(
    c: SolitonCandidate,
    s: AlmostContactStructure,
    profile: AlphaBetaProfile,
    conn: Connection,
    plan: SamplePlan,
    tolerance: float = 1e-9,
) -> CheckReport:
    """Direct computation against the closed forms valid for V = eta(V) xi:
    nabla V, L_V g and div V in terms of eta(V), alpha, beta."""
    if not c.collinear:
        raise SolitonError("collinear flag not set on the candidate")
    if profile.alpha is None or profile.beta is None:
        raise SolitonError("the lemma checks need declared alpha/beta expressions")
    chart = s.chart
    points = plan.points(chart)
    m = s.m
    n = s.n
    ev = eta_of(c.v, s)
    dv = covariant_derivative(c.v, conn)        # [X, out]
    lvg = lie_derivative(c.v, s.metric.tensor)
    div_v = divergence(c.v, conn)
    d_ev = [ev.differentiate(co) for co in chart.coords]
    xi_ev = directional_derivative(ev, s.xi)

    res_ee, res_pp, res_hh, scales = [], [], [], []
    for p in points:
        phi = s.phi.evaluate(p)
        xi = s.xi.evaluate(p)
        eta = s.eta.evaluate(p)
        g = s.metric.matrix_at(p)
        a = profile.alpha.evaluate(p)
        b = profile.beta.evaluate(p)
        e = ev.evaluate(p)
        de = np.array([d.evaluate(p) for d in d_ev])
        ident = np.eye(m)
        # nabla V: [X, out]
        rhs_ee = np.einsum("i,k->ik", de - a * e * eta, xi) + e * (
            a * ident.T - b * phi.T
        )
        res_ee.append(dv.evaluate(p) - rhs_ee)
        rhs_pp = (
            np.outer(de, eta)
            + np.outer(eta, de)
            + 2.0 * a * e * (g - np.outer(eta, eta))
        )
        res_pp.append(lvg.evaluate(p) - rhs_pp)
        res_hh.append(
            np.array([div_v.evaluate(p) - (2.0 * n * a * e + xi_ev.evaluate(p))])
        )
        scales.append((1.0 + abs(a) + abs(b)) * (1.0 + abs(e)) * float(np.abs(g).max()))

    children = [
        CheckReport.from_values("lemma-nabla-V", points, res_ee, tolerance, scales),
        CheckReport.from_values("lemma-lie-V-g", points, res_pp, tolerance, scales),
        CheckReport.from_values("lemma-div-V", points, res_hh, tolerance, scales),
    ]
    return CheckReport.aggregate(f"{c.name}:collinear-lemma", children, tolerance)


# -- contracted identities -------------------------------------------------


def _once_contracted_residual(c, g, bundle, conn, n):
    """1/2 L_V g + Ric/(2n-1) - (2n lambda - div V)/(2n-1) g."""
    lvg = lie_derivative(c.v, g.tensor)
    div_v = divergence(c.v, conn)
    coeff = (2 * n * c.lam.sym - div_v.sym) / (2 * n - 1)
    return (
        lvg.scale(sp.Rational(1, 2))
        + bundle.ricci.scale(sp.Rational(1, 2 * n - 1))
        - g.tensor.scale(coeff)
    )


def _scalar_contracted_residual(c, bundle, conn, n):
    """scal - 2n[(2n+1) lambda - 2 div V]."""
    div_v = divergence(c.v, conn)
    return ScalarExpr(
        sp.cancel(bundle.scalar.sym - 2 * n * ((2 * n + 1) * c.lam.sym - 2 * div_v.sym)),
        c.v.coords,
    )


def contracted_identity_checks(
    c: SolitonCandidate,
    s: AlmostContactStructure,
    profile: AlphaBetaProfile,
    bundle: CurvatureBundle,
    conn: Connection,
    plan: SamplePlan,
    tolerance: float = 1e-9,
) -> CheckReport:
    """Identities obtained by contracting the soliton equation.

    Checks run only when the candidate's own residual passes (the
    hypotheses of the contracted identities hold); otherwise they are
    reported as skipped."""
    chart = s.chart
    g = s.metric
    n = s.n
    hypothesis = soliton_residual(c, g, bundle, plan, chart, tolerance)
    name = f"{c.name}:contracted-identities"
    if not hypothesis.passed:
        rep = CheckReport.skipped(name, tolerance, "soliton hypothesis residual failed")
        rep.children = [hypothesis]
        return rep

    children = [hypothesis]
    points = plan.points(chart)

    def scalar_report(label, expr, scale_expr=None):
        values, scales = [], []
        for p in points:
            values.append(np.array([expr.evaluate(p)]))
            scales.append(abs(scale_expr.evaluate(p)) if scale_expr is not None else 1.0)
        return CheckReport.from_values(label, points, values, tolerance, scales)

    if c.kind == "riemann":
        eq4 = _once_contracted_residual(c, g, bundle, conn, n)
        children.append(
            _frame_report("eq-contract-once", eq4, [bundle.ricci], g, chart, plan, tolerance)
        )
        children.append(
            scalar_report("eq-contract-twice", _scalar_contracted_residual(c, bundle, conn, n), bundle.scalar)
        )
    if c.collinear and profile.alpha is not None:
        children.extend(
            _collinear_ric_q_scal_checks(c, s, profile, bundle, plan, tolerance)
        )
    return CheckReport.aggregate(name, children, tolerance)


def _collinear_ric_q_scal_checks(c, s, profile, bundle, plan, tolerance):
    """Explicit Ric, Q and scal forms for collinear potentials (one set for
    the Riemann equation, one for the Ricci equation)."""
    chart = s.chart
    g = s.metric
    n = s.n
    m = s.m
    points = plan.points(chart)
    ev = eta_of(c.v, s)
    d_ev = [ev.differentiate(co) for co in chart.coords]
    xi_ev = directional_derivative(ev, s.xi)
    grad_ev = gradient(ev, g)
    lam = c.lam

    res_ric, res_q, res_scal, scales = [], [], [], []
    for p in points:
        gm = g.matrix_at(p)
        fr = g.frame_at(p)
        eta = s.eta.evaluate(p)
        xi = s.xi.evaluate(p)
        a = profile.alpha.evaluate(p)
        e = ev.evaluate(p)
        de = np.array([d.evaluate(p) for d in d_ev])
        ge = grad_ev.evaluate(p)
        lv = lam.evaluate(p)
        xiev = xi_ev.evaluate(p)
        ident = np.eye(m)
        ric = bundle.ricci.evaluate(p)
        q = bundle.ricci_operator.evaluate(p)
        scal = bundle.scalar.evaluate(p)
        sym_de_eta = np.outer(de, eta) + np.outer(eta, de)
        if c.kind == "riemann":
            coeff = 2 * n * lv - (4 * n - 1) * a * e - xiev
            ric_rhs = (
                -((2 * n - 1) / 2.0)
                * (sym_de_eta - 2.0 * a * e * np.outer(eta, eta))
                + coeff * gm
            )
            # Q = -(2n-1)/2 {[d(eta V) - 2 alpha eta(V) eta] (x) xi + eta (x) grad(eta V)}
            #     + coeff Id  ; as an operator Q^i_j acting on d_j
            q_rhs = (
                -((2 * n - 1) / 2.0)
                * (
                    np.einsum("j,i->ij", de - 2.0 * a * e * eta, xi)
                    + np.einsum("j,i->ij", eta, ge)
                )
                + coeff * ident
            )
            scal_rhs = 2 * n * ((2 * n + 1) * lv - 4 * n * a * e - 2 * xiev)
        else:
            coeff = lv - a * e
            ric_rhs = (
                -0.5 * sym_de_eta + coeff * gm + a * e * np.outer(eta, eta)
            )
            q_rhs = (
                -0.5
                * (
                    np.einsum("j,i->ij", de - 2.0 * a * e * eta, xi)
                    + np.einsum("j,i->ij", eta, ge)
                )
                + coeff * ident
            )
            scal_rhs = (2 * n + 1) * lv - 2 * n * a * e - xiev
        ric_rhs = np.asarray(ric_rhs, dtype=float)
        q_rhs = np.asarray(q_rhs, dtype=float)
        res_ric.append(frame_project(ric - ric_rhs, (COV, COV), gm, fr))
        res_q.append(frame_project(q - q_rhs, (CONTRA, COV), gm, fr))
        res_scal.append(np.array([scal - float(scal_rhs)]))
        scales.append(max(float(np.abs(ric).max()), abs(scal), 1.0))
    label = "riemann" if c.kind == "riemann" else "ricci"
    return [
        CheckReport.from_values(f"collinear-ric-form-{label}", points, res_ric, tolerance, scales),
        CheckReport.from_values(f"collinear-q-form-{label}", points, res_q, tolerance, scales),
        CheckReport.from_values(f"collinear-scal-form-{label}", points, res_scal, tolerance, scales),
    ]


# -- transfer Riemann -> Ricci ---------------------------------------------


def transfer_riemann_to_ricci(
    c: SolitonCandidate,
    s: AlmostContactStructure,
    bundle: CurvatureBundle,
    conn: Connection,
    plan: SamplePlan,
    profile: AlphaBetaProfile | None = None,
    tolerance: float = 1e-9,
):
    """From a Riemann candidate (V, lambda), build
    Vbar = (2n-1) V, lambdabar = 2n lambda - div V, and verify the Ricci
    soliton residual of (Vbar, lambdabar).  For collinear potentials with
    declared alpha/beta the closed forms of lambda and lambdabar are checked
    as well.  Returns (derived candidate, CheckReport)."""
    if c.kind != "riemann":
        raise SolitonError("transfer starts from a Riemann candidate")
    chart = s.chart
    g = s.metric
    n = s.n
    div_v = divergence(c.v, conn)
    lam_bar = ScalarExpr(sp.cancel(2 * n * c.lam.sym - div_v.sym), chart.coords)
    v_bar = c.v.scale(2 * n - 1)
    derived = SolitonCandidate(
        name=f"{c.name}->ricci", v=v_bar, lam=lam_bar, kind="ricci", collinear=c.collinear
    )
    children = [soliton_residual(derived, g, bundle, plan, chart, tolerance)]
    points = plan.points(chart)
    if c.collinear and profile is not None and profile.alpha is not None:
        ev = eta_of(c.v, s)
        xi_ev = directional_derivative(ev, s.xi)
        xi_alpha = directional_derivative(profile.alpha, s.xi)
        base = (
            profile.beta.sym**2 - profile.alpha.sym**2 - xi_alpha.sym
        )
        lam_pred = ScalarExpr(
            sp.cancel(xi_ev.sym + profile.alpha.sym * ev.sym + base), chart.coords
        )
        lam_bar_pred = ScalarExpr(
            sp.cancel((2 * n - 1) * xi_ev.sym + 2 * n * base), chart.coords
        )
        for label, got, want in (
            ("transfer-lambda-closed-form", c.lam, lam_pred),
            ("transfer-lambdabar-closed-form", lam_bar, lam_bar_pred),
        ):
            values, scales = [], []
            for p in points:
                values.append(np.array([got.evaluate(p) - want.evaluate(p)]))
                scales.append(abs(want.evaluate(p)))
            children.append(CheckReport.from_values(label, points, values, tolerance, scales))
    report = CheckReport.aggregate(f"{c.name}:transfer-to-ricci", children, tolerance)
    return derived, report


# -- quasi-Einstein fit ----------------------------------------------------


def quasi_einstein_decompose(
    bundle: CurvatureBundle,
    s: AlmostContactStructure,
    plan: SamplePlan,
    tolerance: float = 1e-9,
):
    """Per-point least squares of Ric = a g + b eta (x) eta.

    Returns (a samples, b samples, CheckReport); b ~ 0 signals Einstein."""
    chart = s.chart
    points = plan.points(chart)
    a_vals, b_vals, values, scales = [], [], [], []
    for p in points:
        gm = s.metric.matrix_at(p)
        fr = s.metric.frame_at(p)
        eta = s.eta.evaluate(p)
        ric = bundle.ricci.evaluate(p)
        basis = np.stack([gm.ravel(), np.outer(eta, eta).ravel()], axis=1)
        sol, *_ = np.linalg.lstsq(basis, ric.ravel(), rcond=None)
        a_vals.append(float(sol[0]))
        b_vals.append(float(sol[1]))
        resid = ric - sol[0] * gm - sol[1] * np.outer(eta, eta)
        values.append(frame_project(resid, (COV, COV), gm, fr))
        scales.append(float(np.abs(frame_project(ric, (COV, COV), gm, fr)).max()))
    report = CheckReport.from_values("quasi-einstein-fit", points, values, tolerance, scales)
    return np.array(a_vals), np.array(b_vals), report


# -- symmetry-condition residuals ------------------------------------------


def symmetry_condition_residuals(
    bundle: CurvatureBundle,
    s: AlmostContactStructure,
    profile: AlphaBetaProfile,
    conn: Connection,
    plan: SamplePlan,
    candidate: SolitonCandidate | None = None,
    tolerance: float = 1e-9,
) -> CheckReport:
    """Residual fields behind the commutation and parallelism hypotheses:
    phi Q - Q phi, phi^2 Q - Q phi^2, the two commutation equivalents in
    eta(V), nabla Ric, nabla Q and phi^2 o nabla Q.  Each is reported
    independently; callers decide which iff-direction to read off."""
    chart = s.chart
    g = s.metric
    m = s.m
    points = plan.points(chart)
    v = candidate.v if candidate is not None else s.xi
    ev = eta_of(v, s)
    d_ev = [ev.differentiate(co) for co in chart.coords]
    grad_ev = gradient(ev, g)
    nabla_ric = covariant_derivative(bundle.ricci, conn)
    nabla_q = covariant_derivative(bundle.ricci_operator, conn)  # [X, out, in]

    res = {key: [] for key in (
        "phi-Q-commutator",
        "phi2-Q-commutator",
        "commutation-equivalent-phi",
        "commutation-equivalent-id",
        "nabla-ric",
        "nabla-Q",
        "phi2-nabla-Q",
    )}
    scales = []
    for p in points:
        gm = g.matrix_at(p)
        fr = g.frame_at(p)
        phi = s.phi.evaluate(p)
        xi = s.xi.evaluate(p)
        eta = s.eta.evaluate(p)
        q = bundle.ricci_operator.evaluate(p)
        phi2 = phi @ phi
        res["phi-Q-commutator"].append(
            frame_project(phi @ q - q @ phi, (CONTRA, COV), gm, fr)
        )
        res["phi2-Q-commutator"].append(
            frame_project(phi2 @ q - q @ phi2, (CONTRA, COV), gm, fr)
        )
        de = np.array([d.evaluate(p) for d in d_ev])
        ge = grad_ev.evaluate(p)
        # eta (x) phi(grad eta(V)) - [d(eta V) o phi] (x) xi, slots [form, vector]
        eq_phi = np.einsum("i,k->ik", eta, phi @ ge) - np.einsum("i,k->ik", de @ phi, xi)
        res["commutation-equivalent-phi"].append(
            frame_project(eq_phi, (COV, CONTRA), gm, fr)
        )
        eq_id = np.einsum("i,k->ik", eta, ge) - np.einsum("i,k->ik", de, xi)
        res["commutation-equivalent-id"].append(
            frame_project(eq_id, (COV, CONTRA), gm, fr)
        )
        nric = nabla_ric.evaluate(p)
        res["nabla-ric"].append(frame_project(nric, (COV, COV, COV), gm, fr))
        nq = nabla_q.evaluate(p)
        res["nabla-Q"].append(frame_project(nq, (COV, CONTRA, COV), gm, fr))
        res["phi2-nabla-Q"].append(
            frame_project(
                np.einsum("ka,xaj->xkj", phi2, nq), (COV, CONTRA, COV), gm, fr
            )
        )
        scales.append(1.0 + float(np.abs(frame_project(q, (CONTRA, COV), gm, fr)).max()))
    children = [
        CheckReport.from_values(name, points, vals, tolerance, scales)
        for name, vals in res.items()
    ]
    return CheckReport.aggregate("symmetry-conditions", children, tolerance)


# -- multi-soliton consistency ---------------------------------------------


def multi_soliton_consistency(
    candidates: list[SolitonCandidate],
    s: AlmostContactStructure,
    profile: AlphaBetaProfile,
    bundle: CurvatureBundle,
    plan: SamplePlan,
    tolerance: float = 1e-9,
    pass_fraction: float = 0.95,
) -> CheckReport:
    """Joint conclusions when one potential carries several soliton kinds.

    xi-potential branch: two or more passing kinds with V = xi force
    alpha = beta = lambda = 0 and Ric = 0.  General branch (n > 1): a pair
    (V, lambda) Riemann and (V, lambdabar) Ricci with the same V forces the
    Einstein relation Ric = 2n/(4n-1) (2 lambdabar - lambda) g."""
    chart = s.chart
    g = s.metric
    n = s.n
    points = plan.points(chart)
    name = "multi-soliton-consistency"

    def passes(c):
        # "pass" = relative residual within tolerance at >= pass_fraction of
        # points, so an isolated ill-conditioned point cannot flip the verdict
        rep = soliton_residual(c, g, bundle, plan, chart, tolerance)
        ok = np.array(rep.point_relative) <= tolerance
        return rep, float(np.mean(ok)) >= pass_fraction

    results = {c.name: passes(c) for c in candidates}
    passing = [c for c in candidates if results[c.name][1]]

    children = []
    xi_like = []
    for c in passing:
        coll = check_collinear(c, s, plan, tolerance=1e-8)
        ev = eta_of(c.v, s)
        is_xi = coll.passed and all(
            abs(ev.evaluate(p) - 1.0) <= 1e-8 for p in points[:5]
        )
        if is_xi:
            xi_like.append(c)
    kinds = {c.kind for c in xi_like}
    if len(kinds) >= 2:
        values, scales = [], []
        for idx, p in enumerate(points):
            gm = g.matrix_at(p)
            fr = g.frame_at(p)
            ric = frame_project(bundle.ricci.evaluate(p), (COV, COV), gm, fr)
            lam_vals = [c.lam.evaluate(p) for c in xi_like]
            a = float(profile.alpha_values[min(idx, len(profile.alpha_values) - 1)])
            b = float(profile.beta_values[min(idx, len(profile.beta_values) - 1)])
            stacked = np.concatenate(
                [ric.ravel(), np.array([a, b] + lam_vals)]
            )
            values.append(stacked)
            scales.append(1.0)
        children.append(
            CheckReport.from_values(
                "ricci-flat-cosymplectic-conclusion", points, values, tolerance, scales
            )
        )
    else:
        children.append(
            CheckReport.not_applicable(
                "ricci-flat-cosymplectic-conclusion",
                tolerance,
                "fewer than two passing soliton kinds share the potential xi",
            )
        )

    # Einstein-relation branch for shared general potential, n > 1
    riemann_pass = [c for c in passing if c.kind == "riemann"]
    ricci_pass = [c for c in passing if c.kind == "ricci"]
    pair = None
    for cr in riemann_pass:
        for cc in ricci_pass:
            same_v = all(
                float(np.abs(cr.v.evaluate(p) - cc.v.evaluate(p)).max()) <= 1e-10
                for p in points[:5]
            )
            if same_v:
                pair = (cr, cc)
                break
        if pair:
            break
    if pair is None:
        children.append(
            CheckReport.not_applicable(
                "einstein-relation",
                tolerance,
                "no Riemann/Ricci pair shares a potential vector field",
            )
        )
    elif n <= 1:
        children.append(
            CheckReport.not_applicable(
                "einstein-relation", tolerance, "stated for n > 1 only"
            )
        )
    else:
        cr, cc = pair
        xi_ev = directional_derivative(eta_of(cr.v, s), s.xi)
        xi_alpha = directional_derivative(profile.alpha, s.xi) if profile.alpha else None
        values, scales = [], []
        lam_vals = []
        for p in points:
            gm = g.matrix_at(p)
            fr = g.frame_at(p)
            ric = frame_project(bundle.ricci.evaluate(p), (COV, COV), gm, fr)
            lam = cr.lam.evaluate(p)
            lam_bar = cc.lam.evaluate(p)
            coeff = 2 * n / (4 * n - 1) * (2 * lam_bar - lam)
            rel = ric - coeff * np.eye(s.m)
            pieces = [rel.ravel()]
            if profile.alpha is not None:
                base = (
                    profile.beta.evaluate(p) ** 2
                    - profile.alpha.evaluate(p) ** 2
                    - xi_alpha.evaluate(p)
                )
                pieces.append(
                    np.array([lam_bar - (xi_ev.evaluate(p) + 2 * n * base)])
                )
            values.append(np.concatenate(pieces))
            scales.append(1.0 + abs(coeff))
        children.append(
            CheckReport.from_values("einstein-relation", points, values, tolerance, scales)
        )

    for c in candidates:
        rep, ok = results[c.name]
        children.append(rep)
    return CheckReport.aggregate(name, children, tolerance)


# -- coherence of the contraction chain ------------------------------------


def contraction_coherence(
    c: SolitonCandidate,
    s: AlmostContactStructure,
    bundle: CurvatureBundle,
    conn: Connection,
    plan: SamplePlan,
    tolerance: float = 1e-9,
) -> CheckReport:
    """The algebra of the derivation itself, valid for ANY candidate:
    g-tracing the rank-4 soliton residual over slots (1,4) gives (2n-1)
    times the once-contracted residual, and g-tracing that one gives
    1/(2n-1) of the scalar residual."""
    if c.kind != "riemann":
        raise SolitonError("contraction coherence applies to Riemann candidates")
    chart = s.chart
    g = s.metric
    n = s.n
    rho4, _ = _riemann_residual_field(c, g, bundle)
    rho2 = _once_contracted_residual(c, g, bundle, conn, n)
    rho9 = _scalar_contracted_residual(c, bundle, conn, n)
    points = plan.points(chart)
    values_a, values_b, scales = [], [], []
    for p in points:
        gm = g.matrix_at(p)
        ginv = g.inverse_at(p)
        fr = g.frame_at(p)
        r4 = rho4.evaluate(p)
        traced = np.einsum("iw,ixyw->xy", ginv, r4)
        r2 = rho2.evaluate(p)
        values_a.append(frame_project(traced - (2 * n - 1) * r2, (COV, COV), gm, fr))
        traced2 = float(np.einsum("ij,ij->", ginv, r2))
        values_b.append(np.array([(2 * n - 1) * traced2 - rho9.evaluate(p)]))
        scales.append(1.0 + float(np.abs(traced).max()))
    children = [
        CheckReport.from_values("trace-rank4-vs-rank2", points, values_a, tolerance, scales),
        CheckReport.from_values("trace-rank2-vs-scalar", points, values_b, tolerance, scales),
    ]
    return CheckReport.aggregate(f"{c.name}:contraction-coherence", children, tolerance)


def xi_curvature_identity_check(
    c: SolitonCandidate,
    s: AlmostContactStructure,
    profile: AlphaBetaProfile,
    bundle: CurvatureBundle,
    plan: SamplePlan,
    tolerance: float = 1e-9,
) -> CheckReport:
    """On points where the Riemann soliton residual vanishes for (xi, lambda)
    on an alpha-Kenmotsu structure, the curvature must satisfy
    R(xi, Y)Z = (lambda - alpha)[g(Y,Z) xi - eta(Z) Y]."""
    chart = s.chart
    g = s.metric
    m = s.m
    hypothesis = soliton_residual(c, g, bundle, plan, chart, tolerance)
    name = f"{c.name}:xi-curvature-identity"
    if not hypothesis.passed:
        rep = CheckReport.skipped(name, tolerance, "soliton hypothesis residual failed")
        rep.children = [hypothesis]
        return rep
    points = plan.points(chart)
    values, scales = [], []
    for p in points:
        gm = g.matrix_at(p)
        fr = g.frame_at(p)
        xi = s.xi.evaluate(p)
        eta = s.eta.evaluate(p)
        lam = c.lam.evaluate(p)
        a = profile.alpha.evaluate(p) if profile.alpha is not None else 0.0
        up = bundle.riemann_up.evaluate(p)   # [i, j, k, l]
        rxi = np.einsum("a,ajkl->jkl", xi, up)  # (R(xi, d_j) d_k)^l
        rhs = (lam - a) * (
            np.einsum("jk,l->jkl", gm, xi) - np.einsum("k,lj->jkl", eta, np.eye(m))
        )
        values.append(frame_project(rxi - rhs, (COV, COV, CONTRA), gm, fr))
        scales.append(1.0 + abs(lam - a))
    rep = CheckReport.from_values(name, points, values, tolerance, scales)
    rep.children = [hypothesis]
    return rep
