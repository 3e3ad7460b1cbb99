"""Almost contact metric structures and the (alpha, beta) condition.

The structure quadruple (phi, xi, eta, g) is validated axiom by axiom at
sample points; the pair of defining functions (alpha, beta) is recovered per
point by least squares from the covariant derivative of phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .checks import CheckReport, SamplePlan
from .expr import Chart, ScalarExpr
from .geometry import Connection, CurvatureBundle, covariant_derivative, directional_derivative, divergence
from .tensor import (
    CONTRA,
    COV,
    MetricField,
    TensorField,
    frame_project,
    lie_derivative,
    outer,
)

CLASS_TAGS = (
    "cosymplectic",
    "beta-Sasakian",
    "alpha-Kenmotsu",
    "Sasakian",
    "Kenmotsu",
    "trans-Sasakian-general",
    "not-(alpha,beta)",
)

_CONST_TOL = 1e-8


class StructureError(ValueError):
    pass


@dataclass
class AlmostContactStructure:
    """The quadruple (phi, xi, eta, g) on an odd-dimensional chart."""

    chart: Chart
    phi: TensorField   # (u, d): phi[i, j] = (phi d_j)^i
    xi: TensorField    # (u,)
    eta: TensorField   # (d,)
    metric: MetricField

    def __post_init__(self):
        if self.m % 2 == 0:
            raise StructureError(f"almost contact structures need odd dimension, got {self.m}")
        if self.phi.variance != (CONTRA, COV):
            raise StructureError("phi must be a (1,1) tensor field")
        if self.xi.variance != (CONTRA,) or self.eta.variance != (COV,):
            raise StructureError("xi must be a vector field and eta a 1-form")

    @property
    def m(self) -> int:
        return self.chart.dim

    @property
    def n(self) -> int:
        return (self.m - 1) // 2


def _axiom_values(s: AlmostContactStructure, point):
    """Residual arrays for the seven structure axioms at one point."""
    phi = s.phi.evaluate(point)
    xi = s.xi.evaluate(point)
    eta = s.eta.evaluate(point)
    g = s.metric.matrix_at(point)
    m = s.m
    ident = np.eye(m)
    return {
        "phi^2 = -Id + eta(x)xi": phi @ phi + ident - np.outer(xi, eta),
        "eta(xi) = 1": np.array([eta @ xi - 1.0]),
        "phi(xi) = 0": phi @ xi,
        "eta o phi = 0": eta @ phi,
        "i_xi g = eta": g @ xi - eta,
        "g(phi.,phi.) = g - eta(x)eta": phi.T @ g @ phi - g + np.outer(eta, eta),
        "g(phi.,.) = -g(.,phi.)": g @ phi + (g @ phi).T,
    }


def validate_structure(
    s: AlmostContactStructure, plan: SamplePlan, tolerance: float = 1e-9
) -> CheckReport:
    """Per-axiom max residuals; passes iff every axiom holds at every point."""
    points = plan.points(s.chart)
    names = list(_axiom_values(s, points[0]).keys())
    per_axiom = {name: [] for name in names}
    scales = []
    for p in points:
        vals = _axiom_values(s, p)
        for name in names:
            per_axiom[name].append(vals[name])
        scales.append(float(np.abs(s.metric.matrix_at(p)).max()))
    children = [
        CheckReport.from_values(name, points, per_axiom[name], tolerance, scales=scales)
        for name in names
    ]
    return CheckReport.aggregate("structure-axioms", children, tolerance)


@dataclass
class AlphaBetaProfile:
    """Fitted (alpha, beta) samples, the fit residual and the class tag."""

    points: np.ndarray
    alpha_values: np.ndarray
    beta_values: np.ndarray
    fit_residuals: np.ndarray
    class_tag: str
    alpha: ScalarExpr | None = None
    beta: ScalarExpr | None = None
    skipped_points: list = field(default_factory=list)

    def classify(self) -> str:
        return _classify(self.alpha_values, self.beta_values, self.fit_residuals)


def _is_zero(values: np.ndarray) -> bool:
    return float(np.abs(values).max()) <= _CONST_TOL


def _is_constant(values: np.ndarray) -> bool:
    spread = float(values.max() - values.min())
    return spread <= _CONST_TOL * (1.0 + abs(float(values.mean())))


def _classify(alpha: np.ndarray, beta: np.ndarray, residuals: np.ndarray, tol: float = 1e-8) -> str:
    if float(np.abs(residuals).max()) > tol:
        return "not-(alpha,beta)"
    a0, b0 = _is_zero(alpha), _is_zero(beta)
    ac, bc = _is_constant(alpha), _is_constant(beta)
    if a0 and b0:
        return "cosymplectic"
    if a0 and bc:
        if abs(float(beta.mean()) - 1.0) <= _CONST_TOL:
            return "Sasakian"
        return "beta-Sasakian"
    if b0 and ac:
        if abs(float(alpha.mean()) - 1.0) <= _CONST_TOL:
            return "Kenmotsu"
        return "alpha-Kenmotsu"
    return "trans-Sasakian-general"


def nabla_phi(s: AlmostContactStructure, conn: Connection) -> TensorField:
    """Covariant derivative of phi; axes [X, out, in]."""
    return covariant_derivative(s.phi, conn)


def fit_alpha_beta(
    s: AlmostContactStructure,
    conn: Connection,
    plan: SamplePlan,
    declared: tuple[ScalarExpr, ScalarExpr] | None = None,
    tolerance: float = 1e-8,
) -> AlphaBetaProfile:
    """Least-squares recovery of (alpha, beta) at each sample point.

    Every coordinate-pair component of the defining relation
        (nabla_X phi)Y = alpha [g(phi X, Y) xi - eta(Y) phi X]
                       + beta  [g(X, Y) xi - eta(Y) X]
    contributes one linear equation in (alpha, beta).  When declared
    expressions are given, the fitted samples must match them or a
    StructureError is raised (this catches transcription errors)."""
    points = plan.points(s.chart)
    dphi = nabla_phi(s, conn)
    m = s.m
    alphas, betas, residuals = [], [], []
    skipped = []
    kept_idx = []
    for pidx, p in enumerate(points):
        lhs = dphi.evaluate(p)          # [X, out, in]
        phi = s.phi.evaluate(p)
        xi = s.xi.evaluate(p)
        eta = s.eta.evaluate(p)
        g = s.metric.matrix_at(p)
        ident = np.eye(m)
        gphi = phi.T @ g                # gphi[i, j] = g(phi d_i, d_j)
        # columns of the least-squares system, axes [X(i), out(k), in(j)]
        col_a = np.einsum("ij,k->ikj", gphi, xi) - np.einsum("j,ki->ikj", eta, phi)
        col_b = np.einsum("ij,k->ikj", g, xi) - np.einsum("j,ki->ikj", eta, ident)
        A = np.stack([col_a.ravel(), col_b.ravel()], axis=1)
        b = lhs.ravel()
        if np.linalg.matrix_rank(A) < 2:
            skipped.append([float(v) for v in p])
            continue
        sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        res = float(np.abs(A @ sol - b).max())
        alphas.append(sol[0])
        betas.append(sol[1])
        residuals.append(res)
        kept_idx.append(pidx)
    if not alphas:
        raise StructureError("the (alpha, beta) system was rank-deficient at every point")
    kept = points[kept_idx]
    alphas = np.array(alphas)
    betas = np.array(betas)
    residuals = np.array(residuals)
    alpha_expr = beta_expr = None
    if declared is not None:
        alpha_expr, beta_expr = declared
        decl_a = np.array([alpha_expr.evaluate(p) for p in kept])
        decl_b = np.array([beta_expr.evaluate(p) for p in kept])
        gap = max(float(np.abs(decl_a - alphas).max()), float(np.abs(decl_b - betas).max()))
        if gap > tolerance:
            raise StructureError(
                f"declared (alpha, beta) disagree with the fitted values (gap {gap:.3e})"
            )
    tag = _classify(alphas, betas, residuals, tol=tolerance)
    return AlphaBetaProfile(
        points=kept,
        alpha_values=alphas,
        beta_values=betas,
        fit_residuals=residuals,
        class_tag=tag,
        alpha=alpha_expr,
        beta=beta_expr,
        skipped_points=skipped,
    )


def f_operator_checks(
    s: AlmostContactStructure,
    profile: AlphaBetaProfile,
    conn: Connection,
    plan: SamplePlan,
    tolerance: float = 1e-9,
) -> CheckReport:
    """Residuals of the F = alpha phi + beta Id identities and of the
    nabla xi / Lie / divergence triple they imply.

    The F-derivative identity needs alpha and beta as expressions; it is
    reported as skipped when the profile only carries fitted samples."""
    points = plan.points(s.chart)
    m = s.m
    n = s.n
    chart = s.chart
    dphi = nabla_phi(s, conn)
    dxi = covariant_derivative(s.xi, conn)   # axes [X, out]
    lie_xi = lie_derivative(s.xi, s.metric.tensor)
    div_xi = divergence(s.xi, conn)

    have_exprs = profile.alpha is not None and profile.beta is not None
    if have_exprs:
        a_sym, b_sym = profile.alpha.sym, profile.beta.sym
        f_field = TensorField(
            chart.coords, (CONTRA, COV), s.phi.comps * a_sym + np.eye(m) * b_sym
        )
        dF = covariant_derivative(f_field, conn)  # [X, out, in]

    res_phi, res_xi, res_dF = [], [], []
    res_e16_xi, res_e16_lie, res_e16_div = [], [], []
    scales = []
    for k, p in enumerate(points):
        phi = s.phi.evaluate(p)
        xi = s.xi.evaluate(p)
        eta = s.eta.evaluate(p)
        g = s.metric.matrix_at(p)
        if have_exprs:
            a = profile.alpha.evaluate(p)
            b = profile.beta.evaluate(p)
        else:
            a = float(profile.alpha_values[k])
            b = float(profile.beta_values[k])
        ident = np.eye(m)
        F = a * phi + b * ident
        gF = F.T @ g                      # gF[i, j] = g(F d_i, d_j)
        lhs = dphi.evaluate(p)            # [X, out, in]
        rhs = np.einsum("ij,k->ikj", gF, xi) - np.einsum("j,ki->ikj", eta, F)
        res_phi.append(lhs - rhs)

        dxi_v = dxi.evaluate(p)           # [X, out]
        res_xi.append(dxi_v + np.einsum("ka,ai->ik", F, phi))

        res_e16_xi.append(dxi_v - (a * (ident - np.outer(xi, eta)) - b * phi).T)
        res_e16_lie.append(lie_xi.evaluate(p) - 2.0 * a * (g - np.outer(eta, eta)))
        res_e16_div.append(np.array([div_xi.evaluate(p) - 2.0 * n * a]))

        if have_exprs:
            da = np.array(
                [profile.alpha.differentiate(c).evaluate(p) for c in chart.coords]
            )
            db = np.array(
                [profile.beta.differentiate(c).evaluate(p) for c in chart.coords]
            )
            rhs_dF = (
                a * lhs
                + np.einsum("i,kj->ikj", da, phi)
                + np.einsum("i,kj->ikj", db, ident)
            )
            res_dF.append(dF.evaluate(p) - rhs_dF)
        scales.append(float(np.abs(g).max()) * (1.0 + abs(a) + abs(b)))

    children = [
        CheckReport.from_values("nabla-phi-via-F", points, res_phi, tolerance, scales),
        CheckReport.from_values("nabla-xi-via-F", points, res_xi, tolerance, scales),
        CheckReport.from_values("derived-nabla-xi", points, res_e16_xi, tolerance, scales),
        CheckReport.from_values("derived-lie-xi-g", points, res_e16_lie, tolerance, scales),
        CheckReport.from_values("derived-div-xi", points, res_e16_div, tolerance, scales),
    ]
    if have_exprs:
        children.append(
            CheckReport.from_values("nabla-F-expansion", points, res_dF, tolerance, scales)
        )
    else:
        children.append(
            CheckReport.skipped(
                "nabla-F-expansion", tolerance, "alpha/beta expressions not declared"
            )
        )
    return CheckReport.aggregate("F-operator-identities", children, tolerance)


def ric_xi_xi_check(
    s: AlmostContactStructure,
    alpha: ScalarExpr,
    beta: ScalarExpr,
    bundle: CurvatureBundle,
    plan: SamplePlan,
    tolerance: float = 1e-8,
) -> CheckReport:
    """Ric(xi, xi) = 2n [beta^2 - alpha^2 - xi(alpha)]."""
    points = plan.points(s.chart)
    n = s.n
    xi_alpha = directional_derivative(alpha, s.xi)
    residuals, scales = [], []
    for p in points:
        ric = bundle.ricci.evaluate(p)
        xi = s.xi.evaluate(p)
        lhs = float(xi @ ric @ xi)
        rhs = 2.0 * n * (
            beta.evaluate(p) ** 2 - alpha.evaluate(p) ** 2 - xi_alpha.evaluate(p)
        )
        residuals.append(np.array([lhs - rhs]))
        scales.append(abs(rhs))
    return CheckReport.from_values("ric-xi-xi-identity", points, residuals, tolerance, scales)
