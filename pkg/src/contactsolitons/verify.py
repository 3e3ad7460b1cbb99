"""Claim-by-claim verification suites.

``curvature_invariant_suite`` runs the structural identities every metric
must satisfy (connection symmetry, metric compatibility, curvature
symmetries, Bianchi identities, Weyl traces).  ``paper_claim_reports`` runs
the golden expectations of the built-in Kenmotsu entry: published connection
and curvature values, Ricci table, Lie derivative table, both soliton
candidates and the transfer cross-check."""

from __future__ import annotations

import itertools

import numpy as np
import sympy as sp

from .checks import CheckReport, SamplePlan
from .contact import fit_alpha_beta, validate_structure
from .geometry import (
    covariant_derivative,
    divergence,
    weyl,
)
from .soliton import soliton_residual, transfer_riemann_to_ricci
from .tensor import (
    CONTRA,
    COV,
    TensorField,
    contract,
    frame_project,
    lie_derivative,
)
from .zoo import ZooEntry


def curvature_invariant_suite(entry: ZooEntry, tolerance_first: float = 1e-10,
                              tolerance_second: float = 1e-8) -> CheckReport:
    """Identity suite for the Levi-Civita curvature of one entry."""
    g = entry.metric
    chart = entry.chart
    conn = entry.connection()
    from .geometry import riemann

    bundle = riemann(g)
    points = entry.plan.points(chart)
    m = g.m

    gamma_sym, nabla_g, r_sym, bianchi1, bianchi2 = [], [], [], [], []
    ric_sym, q_adj, weyl_trace, weyl_dim3, inv_check = [], [], [], [], []
    scales = []

    nab_g = covariant_derivative(g.tensor, conn)
    nab_r = covariant_derivative(bundle.riemann_low, conn)
    w = weyl(bundle)
    w_trace = contract(w, 0, 3, g)

    for p in points:
        gm = g.matrix_at(p)
        ginv = g.inverse_at(p)
        fr = g.frame_at(p)
        gam = conn.evaluate(p)
        gamma_sym.append(gam - np.swapaxes(gam, 1, 2))
        nabla_g.append(frame_project(nab_g.evaluate(p), nab_g.variance, gm, fr))
        rl = frame_project(
            bundle.riemann_low.evaluate(p), bundle.riemann_low.variance, gm, fr
        )
        r_sym.append(
            np.concatenate(
                [
                    (rl + np.swapaxes(rl, 0, 1)).ravel(),
                    (rl + np.swapaxes(rl, 2, 3)).ravel(),
                    (rl - np.transpose(rl, (2, 3, 0, 1))).ravel(),
                ]
            )
        )
        bianchi1.append(
            rl + np.transpose(rl, (0, 2, 3, 1)) + np.transpose(rl, (0, 3, 1, 2))
        )
        nr = frame_project(nab_r.evaluate(p), nab_r.variance, gm, fr)
        # nabla_m R_ijkl + nabla_k R_ijlm + nabla_l R_ijmk, slots [m, i, j, k, l]
        bianchi2.append(
            nr
            + np.transpose(nr, (3, 1, 2, 4, 0))
            + np.transpose(nr, (4, 1, 2, 0, 3))
        )
        ric = frame_project(bundle.ricci.evaluate(p), (COV, COV), gm, fr)
        ric_sym.append(ric - ric.T)
        q = bundle.ricci_operator.evaluate(p)
        q_adj.append(gm @ q - (gm @ q).T)
        weyl_trace.append(frame_project(w_trace.evaluate(p), w_trace.variance, gm, fr))
        if m == 3:
            weyl_dim3.append(frame_project(w.evaluate(p), w.variance, gm, fr))
        ginv_res = ginv @ gm - np.eye(m)
        inv_check.append(ginv_res)
        scales.append(float(np.abs(rl).max()) + float(np.abs(gm).max()))

    children = [
        CheckReport.from_values("christoffel-symmetry", points, gamma_sym, tolerance_first),
        CheckReport.from_values("metric-compatibility", points, nabla_g, tolerance_first, scales),
        CheckReport.from_values("metric-inverse", points, inv_check, tolerance_first),
        CheckReport.from_values("riemann-symmetries", points, r_sym, tolerance_first, scales),
        CheckReport.from_values("first-bianchi", points, bianchi1, tolerance_first, scales),
        CheckReport.from_values("second-bianchi", points, bianchi2, tolerance_second, scales),
        CheckReport.from_values("ricci-symmetry", points, ric_sym, tolerance_first, scales),
        CheckReport.from_values("ricci-operator-self-adjoint", points, q_adj, tolerance_first, scales),
        CheckReport.from_values("weyl-trace-free", points, weyl_trace, 1e-9, scales),
    ]
    if m == 3:
        children.append(
            CheckReport.from_values("weyl-vanishes-dim3", points, weyl_dim3, 1e-9, scales)
        )
    return CheckReport.aggregate(f"{entry.name}:curvature-invariants", children, tolerance_first)


def _frame_vector_components(entry: ZooEntry, vec_values: np.ndarray, p) -> np.ndarray:
    """Components of a coordinate vector against the entry's frame:
    c_i = g(v, E_i)."""
    gm = entry.metric.matrix_at(p)
    frame = np.stack([e.evaluate(p) for e in entry.frame], axis=1)
    return frame.T @ gm @ vec_values


def paper_claim_reports(entry: ZooEntry, plan: SamplePlan | None = None,
                        tolerance: float = 1e-9) -> list[CheckReport]:
    """Golden-claim reports for the built-in Kenmotsu example entry."""
    if entry.frame is None:
        raise ValueError("paper claims need an entry with a declared frame")
    chart = entry.chart
    g = entry.metric
    conn = entry.connection()
    from .geometry import riemann

    bundle = riemann(g)
    plan = plan or entry.plan
    points = plan.points(chart)
    m = chart.dim
    reports: list[CheckReport] = []

    # structure axioms and the (alpha, beta) fit
    structure_rep = validate_structure(entry.structure, plan, tolerance)
    structure_rep.name = "structure-axioms"
    reports.append(structure_rep)
    profile = fit_alpha_beta(
        entry.structure, conn, plan, declared=(entry.alpha, entry.beta)
    )
    fit_vals = []
    for a, b in zip(profile.alpha_values, profile.beta_values):
        fit_vals.append(np.array([a - 1.0, b]))
    rep = CheckReport.from_values(
        "alpha-beta", profile.points, fit_vals, tolerance,
        details={"class": profile.class_tag},
    )
    if profile.class_tag != "Kenmotsu":
        rep.status = "fail"
    reports.append(rep)

    # connection table in the declared frame: expected frame components of
    # nabla_{E_i} E_j; the only nonzero entries are the published ones
    expected_conn = np.zeros((m, m, m))
    expected_conn[0, 0, 2] = -1.0   # nabla_E1 E1 = -E3
    expected_conn[1, 1, 2] = -1.0   # nabla_E2 E2 = -E3
    expected_conn[0, 2, 0] = 1.0    # nabla_E1 E3 = E1
    expected_conn[1, 2, 1] = 1.0    # nabla_E2 E3 = E2
    syms = [sp.Symbol(c) for c in chart.coords]
    nabla_frame = np.empty((m, m, m), dtype=object)  # [i, j, k] = (nabla_{E_i} E_j)^k
    for i, j in itertools.product(range(m), repeat=2):
        ei = entry.frame[i].comps
        ej = entry.frame[j].comps
        for k in range(m):
            total = sp.Integer(0)
            for a in range(m):
                total += ei[a] * sp.diff(ej[k], syms[a])
                for b in range(m):
                    total += ei[a] * conn.gamma[k, a, b] * ej[b]
            nabla_frame[i, j, k] = sp.cancel(total)
    nabla_field = TensorField(chart.coords, (COV, COV, CONTRA), nabla_frame)

    def conn_claim(name, i, j, expect_idx):
        values = []
        for p in points:
            vecs = nabla_field.evaluate(p)
            comps = _frame_vector_components(entry, vecs[i, j], p)
            values.append(comps - expect_idx)
        return CheckReport.from_values(name, points, values, tolerance)

    reports.append(conn_claim("connection-e1e1", 0, 0, expected_conn[0, 0]))
    reports.append(conn_claim("connection-e2e2", 1, 1, expected_conn[1, 1]))
    reports.append(conn_claim("connection-e1e3", 0, 2, expected_conn[0, 2]))
    reports.append(conn_claim("connection-e2e3", 1, 2, expected_conn[1, 2]))
    other = []
    for p in points:
        vecs = nabla_field.evaluate(p)
        resid = []
        for i, j in itertools.product(range(m), repeat=2):
            comps = _frame_vector_components(entry, vecs[i, j], p)
            resid.append(comps - expected_conn[i, j])
        other.append(np.concatenate(resid))
    reports.append(
        CheckReport.from_values("connection-table-complete", points, other, tolerance)
    )

    # curvature table: R(E_i, E_j) E_j = -E_i for the published index triples
    curvature_claims = [
        ("curvature-1221", 0, 1, 1, 0),
        ("curvature-1331", 0, 2, 2, 0),
        ("curvature-2112", 1, 0, 0, 1),
        ("curvature-2332", 1, 2, 2, 1),
        ("curvature-3113", 2, 0, 0, 2),
        ("curvature-3223", 2, 1, 1, 2),
    ]
    for name, i, j, k, target in curvature_claims:
        values = []
        for p in points:
            gm = g.matrix_at(p)
            frame = np.stack([e.evaluate(p) for e in entry.frame], axis=1)
            rl = frame_project(
                bundle.riemann_low.evaluate(p), bundle.riemann_low.variance, gm, frame
            )
            expect = np.zeros(m)
            expect[target] = -1.0
            values.append(rl[i, j, k] - expect)
        reports.append(CheckReport.from_values(name, points, values, tolerance))

    # Ricci table, scalar curvature, Lie derivative table
    ric_vals, scal_vals, lie_vals = [], [], []
    v_cand = entry.candidate("v-riemann")
    lvg = lie_derivative(v_cand.v, g.tensor)
    for p in points:
        gm = g.matrix_at(p)
        frame = np.stack([e.evaluate(p) for e in entry.frame], axis=1)
        ric = frame_project(bundle.ricci.evaluate(p), (COV, COV), gm, frame)
        ric_vals.append(ric - (-2.0) * np.eye(m))
        scal_vals.append(np.array([bundle.scalar.evaluate(p) + 6.0]))
        lv = frame_project(lvg.evaluate(p), (COV, COV), gm, frame)
        lie_vals.append(lv - 2.0 * np.exp(p[2]) * np.eye(m))
    reports.append(CheckReport.from_values("ricci-diagonal", points, ric_vals, tolerance))
    reports.append(CheckReport.from_values("scalar-curvature", points, scal_vals, tolerance))
    reports.append(CheckReport.from_values("lie-v-g-diagonal", points, lie_vals, tolerance))

    # soliton candidates and the transfer cross-check
    c_riemann = entry.candidate("v-riemann")
    c_ricci = entry.candidate("v-ricci")
    rep_r = soliton_residual(c_riemann, g, bundle, plan, chart, tolerance)
    rep_r.name = "riemann-soliton"
    reports.append(rep_r)
    rep_c = soliton_residual(c_ricci, g, bundle, plan, chart, tolerance)
    rep_c.name = "ricci-soliton"
    reports.append(rep_c)

    n = entry.structure.n
    div_v = divergence(c_riemann.v, conn)
    transfer_vals = []
    for p in points:
        lam_bar = 2 * n * c_riemann.lam.evaluate(p) - div_v.evaluate(p)
        transfer_vals.append(np.array([lam_bar - c_ricci.lam.evaluate(p)]))
    reports.append(
        CheckReport.from_values("transfer-lambda", points, transfer_vals, 1e-10)
    )
    derived, transfer_rep = transfer_riemann_to_ricci(
        c_riemann, entry.structure, bundle, conn, plan, profile, tolerance
    )
    transfer_rep.name = "transfer-to-ricci"
    reports.append(transfer_rep)
    return reports
