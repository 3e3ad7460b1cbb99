import math

import numpy as np
import pytest
import sympy as sp

from conftest import bundle_for
from contactsolitons.geometry import divergence
from contactsolitons.soliton import (
    SolitonCandidate,
    SolitonError,
    check_collinear,
    collinear_lemma_checks,
    contracted_identity_checks,
    contraction_coherence,
    eta_of,
    multi_soliton_consistency,
    quasi_einstein_decompose,
    solve_lambda_pointwise,
    soliton_residual,
    symmetry_condition_residuals,
    transfer_riemann_to_ricci,
    xi_curvature_identity_check,
)
from contactsolitons.tensor import (
    CONTRA,
    TensorField,
    frame_project,
    kulkarni_nomizu,
    lie_derivative,
)


def child_status(report):
    return {c.name: c.status for c in report.children}


class TestResiduals:
    def test_riemann_candidate_passes(self, paper, paper_bundle):
        c = paper.candidate("v-riemann")
        rep = soliton_residual(c, paper.metric, paper_bundle, paper.plan, paper.chart, 1e-9)
        assert rep.status == "pass"
        assert rep.max_relative <= 1e-12

    def test_ricci_candidate_passes(self, paper, paper_bundle):
        c = paper.candidate("v-ricci")
        rep = soliton_residual(c, paper.metric, paper_bundle, paper.plan, paper.chart, 1e-9)
        assert rep.status == "pass"

    def test_xi_candidates_fail(self, paper, paper_bundle):
        for name in ("xi-riemann", "xi-ricci", "xi-yamabe"):
            c = paper.candidate(name)
            rep = soliton_residual(c, paper.metric, paper_bundle, paper.plan, paper.chart, 1e-9)
            assert rep.status == "fail", name

    def test_perturbed_lambda_predicted_gap(self, paper, paper_bundle):
        # lambda -> lambda + 1 shifts the rank-4 residual by -(1/2) g o g,
        # whose (1,2,2,1) orthonormal-frame component is -1
        good = paper.candidate("v-riemann")
        bad = SolitonCandidate(
            name="v-bad", v=good.v, lam=good.lam + 1.0, kind="riemann", collinear=True
        )
        g = paper.metric
        lvg = lie_derivative(bad.v, g.tensor)
        residual = (
            kulkarni_nomizu(lvg, g.tensor).scale(sp.Rational(1, 2))
            + paper_bundle.riemann_low
            - kulkarni_nomizu(g.tensor, g.tensor).scale(bad.lam.sym / 2)
        )
        for p in ([0.0, 0.0, 1.5], [0.5, -0.5, 1.2]):
            gm = g.matrix_at(p)
            fr = g.frame_at(p)
            vals = frame_project(residual.evaluate(p), residual.variance, gm, fr)
            assert vals[0, 1, 1, 0] == pytest.approx(-1.0, abs=1e-9)
        rep = soliton_residual(bad, g, paper_bundle, paper.plan, paper.chart, 1e-9)
        assert rep.status == "fail"
        assert rep.max_residual == pytest.approx(1.0, abs=1e-9)

    def test_unknown_kind_rejected(self, paper):
        good = paper.candidate("v-riemann")
        with pytest.raises(SolitonError):
            SolitonCandidate(name="x", v=good.v, lam=good.lam, kind="weyl")


class TestCollinearity:
    def test_eta_of_potential(self, paper):
        c = paper.candidate("v-riemann")
        e = eta_of(c.v, paper.structure)
        assert e.evaluate([0.0, 0.0, 1.4]) == pytest.approx(math.exp(1.4), rel=1e-13)

    def test_check_collinear(self, paper):
        c = paper.candidate("v-riemann")
        assert check_collinear(c, paper.structure, paper.plan).status == "pass"
        sideways = SolitonCandidate(
            name="w",
            v=TensorField.from_strings(paper.chart.coords, (CONTRA,), ["1", "0", "0"]),
            lam=paper.chart.zero(),
            kind="ricci",
        )
        assert check_collinear(sideways, paper.structure, paper.plan).status == "fail"


class TestSolveLambda:
    def test_recovers_published_lambda(self, paper, paper_bundle):
        c = paper.candidate("v-riemann")
        lambdas, rep = solve_lambda_pointwise(
            "riemann", c.v, paper.metric, paper_bundle, paper.plan, paper.chart, 1e-9
        )
        assert rep.status == "pass"
        points = paper.plan.points(paper.chart)
        expect = 2.0 * np.exp(points[:, 2]) - 1.0
        assert np.abs(lambdas - expect).max() <= 1e-10

    def test_irreducible_residual_xi_ricci(self, paper, paper_bundle):
        _, rep = solve_lambda_pointwise(
            "ricci", paper.structure.xi, paper.metric, paper_bundle, paper.plan,
            paper.chart, 1e-9,
        )
        assert rep.status == "fail"
        assert rep.max_residual >= 0.1

    def test_irreducible_residual_xi_yamabe(self, paper, paper_bundle):
        _, rep = solve_lambda_pointwise(
            "yamabe", paper.structure.xi, paper.metric, paper_bundle, paper.plan,
            paper.chart, 1e-9,
        )
        assert rep.status == "fail"
        assert rep.max_residual >= 0.1


class TestCollinearLemma:
    def test_paper_potential(self, paper):
        c = paper.candidate("v-riemann")
        rep = collinear_lemma_checks(
            c, paper.structure, paper.profile(), paper.connection(), paper.plan, 1e-9
        )
        assert rep.status == "pass"
        assert set(child_status(rep)) == {"lemma-nabla-V", "lemma-lie-V-g", "lemma-div-V"}

    def test_flat_fz_xi_potential(self, flat3):
        v = TensorField.from_strings(flat3.chart.coords, (CONTRA,), ["0", "0", "sin(z)"])
        c = SolitonCandidate(name="fz-xi", v=v, lam=flat3.chart.zero(),
                             kind="ricci", collinear=True)
        rep = collinear_lemma_checks(
            c, flat3.structure, flat3.profile(), flat3.connection(), flat3.plan, 1e-9
        )
        assert rep.status == "pass", rep.to_dict(include_points=False)

    def test_requires_collinear_flag(self, paper):
        c = paper.candidate("v-riemann")
        loose = SolitonCandidate(name="w", v=c.v, lam=c.lam, kind="riemann", collinear=False)
        with pytest.raises(SolitonError):
            collinear_lemma_checks(
                loose, paper.structure, paper.profile(), paper.connection(), paper.plan
            )


class TestContractedIdentities:
    def test_passing_candidate_runs_all(self, paper, paper_bundle):
        c = paper.candidate("v-riemann")
        rep = contracted_identity_checks(
            c, paper.structure, paper.profile(), paper_bundle, paper.connection(),
            paper.plan, 1e-9,
        )
        assert rep.status == "pass"
        statuses = child_status(rep)
        assert statuses["eq-contract-once"] == "pass"
        assert statuses["eq-contract-twice"] == "pass"
        assert statuses["collinear-scal-form-riemann"] == "pass"

    def test_failing_hypothesis_skips(self, paper, paper_bundle):
        c = paper.candidate("xi-riemann")
        rep = contracted_identity_checks(
            c, paper.structure, paper.profile(), paper_bundle, paper.connection(),
            paper.plan, 1e-9,
        )
        assert rep.status == "skipped"


class TestTransfer:
    def test_lambdabar_closed_form(self, paper, paper_bundle):
        c = paper.candidate("v-riemann")
        derived, rep = transfer_riemann_to_ricci(
            c, paper.structure, paper_bundle, paper.connection(), paper.plan,
            paper.profile(), 1e-9,
        )
        assert rep.status == "pass"
        assert derived.kind == "ricci"
        # lambdabar = 2 lambda - div V matches the published e^z - 2
        for zv in (1.2, 1.6, 1.9):
            p = [0.0, 0.0, zv]
            assert derived.lam.evaluate(p) == pytest.approx(math.exp(zv) - 2.0, rel=1e-12)

    def test_transfer_pointwise_identity(self, paper, paper_bundle):
        c = paper.candidate("v-riemann")
        target = paper.candidate("v-ricci")
        div_v = divergence(c.v, paper.connection())
        n = paper.structure.n
        for p in paper.plan.points(paper.chart)[:20]:
            bar = 2 * n * c.lam.evaluate(p) - div_v.evaluate(p)
            assert abs(bar - target.lam.evaluate(p)) <= 1e-10

    def test_only_riemann_kind(self, paper, paper_bundle):
        c = paper.candidate("v-ricci")
        with pytest.raises(SolitonError):
            transfer_riemann_to_ricci(
                c, paper.structure, paper_bundle, paper.connection(), paper.plan
            )


class TestQuasiEinstein:
    def test_paper_is_einstein(self, paper, paper_bundle):
        a_vals, b_vals, rep = quasi_einstein_decompose(
            paper_bundle, paper.structure, paper.plan, 1e-9
        )
        assert rep.status == "pass"
        assert np.abs(a_vals + 2.0).max() <= 1e-10
        assert np.abs(b_vals).max() <= 1e-10


class TestSymmetryConditions:
    def test_paper_commutations_hold(self, paper, paper_bundle):
        rep = symmetry_condition_residuals(
            paper_bundle, paper.structure, paper.profile(), paper.connection(),
            paper.plan, candidate=paper.candidate("v-riemann"), tolerance=1e-9,
        )
        assert rep.status == "pass"
        statuses = child_status(rep)
        for name in ("phi-Q-commutator", "commutation-equivalent-phi", "nabla-Q"):
            assert statuses[name] == "pass"


class TestMultiSoliton:
    def test_flat_triple_soliton(self, flat3):
        cands = [flat3.candidate(n) for n in ("xi-riemann", "xi-ricci", "xi-yamabe")]
        rep = multi_soliton_consistency(
            cands, flat3.structure, flat3.profile(), bundle_for(flat3), flat3.plan, 1e-10
        )
        assert rep.status == "pass"
        statuses = child_status(rep)
        assert statuses["ricci-flat-cosymplectic-conclusion"] == "pass"

    def test_paper_xi_branch_fails(self, paper, paper_bundle):
        cands = [paper.candidate(n) for n in ("xi-riemann", "xi-ricci", "xi-yamabe")]
        rep = multi_soliton_consistency(
            cands, paper.structure, paper.profile(), paper_bundle, paper.plan, 1e-9
        )
        assert rep.status == "fail"


class TestContractionCoherence:
    def test_passing_candidate(self, paper, paper_bundle):
        rep = contraction_coherence(
            paper.candidate("v-riemann"), paper.structure, paper_bundle,
            paper.connection(), paper.plan, 1e-9,
        )
        assert rep.status == "pass"

    def test_failing_candidate_still_coheres(self, paper, paper_bundle):
        # the contraction algebra holds even when the soliton equation fails
        rep = contraction_coherence(
            paper.candidate("xi-riemann"), paper.structure, paper_bundle,
            paper.connection(), paper.plan, 1e-9,
        )
        assert rep.status == "pass"


class TestXiCurvatureIdentity:
    def test_flat_hypothesis_holds(self, flat3):
        rep = xi_curvature_identity_check(
            flat3.candidate("xi-riemann"), flat3.structure, flat3.profile(),
            bundle_for(flat3), flat3.plan, 1e-9,
        )
        assert rep.status == "pass"

    def test_paper_hypothesis_fails_skips(self, paper, paper_bundle):
        rep = xi_curvature_identity_check(
            paper.candidate("xi-riemann"), paper.structure, paper.profile(),
            paper_bundle, paper.plan, 1e-9,
        )
        assert rep.status == "skipped"


class TestDeterminism:
    def test_same_seed_same_residuals(self, paper, paper_bundle):
        c = paper.candidate("v-riemann")
        r1 = soliton_residual(c, paper.metric, paper_bundle, paper.plan, paper.chart, 1e-9)
        r2 = soliton_residual(c, paper.metric, paper_bundle, paper.plan, paper.chart, 1e-9)
        assert r1.point_residuals == r2.point_residuals
        assert r1.to_dict() == r2.to_dict()

    def test_different_seed_different_points(self, paper):
        p1 = paper.plan.points(paper.chart)
        p2 = paper.plan.with_seed(7).points(paper.chart)
        assert p1.shape == p2.shape
        assert not np.allclose(p1, p2)
