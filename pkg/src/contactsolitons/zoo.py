"""Built-in, self-validating example manifolds.

Each entry carries its chart, metric, contact structure, declared
(alpha, beta), soliton candidates and an expected-values table used by the
one-command verification suite.  Entries are validated on construction:
structure axioms must hold and the fitted (alpha, beta) must match the
declared expressions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from .checks import CheckReport, GridAxis, SamplePlan
from .expr import Chart, ScalarExpr
from .contact import (
    AlmostContactStructure,
    AlphaBetaProfile,
    StructureError,
    fit_alpha_beta,
    validate_structure,
)
from .geometry import Connection, christoffel
from .soliton import SolitonCandidate
from .tensor import MetricField, TensorField


class ZooError(ValueError):
    pass


@dataclass
class ExpectedValue:
    """One golden claim: a short id, a human-readable statement and the
    provenance of the expected value ('paper', 'derived' or 'trivial')."""

    claim: str
    statement: str
    provenance: str


@dataclass
class ZooEntry:
    name: str
    chart: Chart
    metric: MetricField
    structure: AlmostContactStructure | None
    alpha: ScalarExpr | None
    beta: ScalarExpr | None
    candidates: list[SolitonCandidate]
    plan: SamplePlan
    frame: list[TensorField] | None = None   # symbolic orthonormal frame E_i
    expected: list[ExpectedValue] = field(default_factory=list)
    _connection: Connection | None = None
    _profile: AlphaBetaProfile | None = None

    def connection(self) -> Connection:
        if self._connection is None:
            self._connection = christoffel(self.metric)
        return self._connection

    def profile(self) -> AlphaBetaProfile:
        if self._profile is None:
            if self.structure is None:
                raise ZooError(f"entry {self.name!r} has no contact structure block")
            declared = None
            if self.alpha is not None and self.beta is not None:
                declared = (self.alpha, self.beta)
            self._profile = fit_alpha_beta(
                self.structure, self.connection(), self.plan, declared=declared
            )
        return self._profile

    def candidate(self, name: str) -> SolitonCandidate:
        for c in self.candidates:
            if c.name == name:
                return c
        raise ZooError(
            f"unknown candidate {name!r}; available: {[c.name for c in self.candidates]}"
        )

    def self_validate(self, tolerance: float = 1e-9) -> None:
        report = validate_structure(self.structure, self.plan, tolerance)
        if not report.passed:
            raise ZooError(
                f"zoo entry {self.name!r} failed structure validation "
                f"(max residual {report.max_residual:.3e})"
            )
        profile = self.profile()
        if float(np.abs(profile.fit_residuals).max()) > tolerance:
            raise ZooError(
                f"zoo entry {self.name!r} does not satisfy the (alpha, beta) "
                f"condition (fit residual {profile.fit_residuals.max():.3e})"
            )


def _rotating_phi(coords) -> TensorField:
    """phi rotating coordinate pairs (d_2i -> d_2i+1) and killing the last."""
    m = len(coords)
    comps = np.full((m, m), sp.Integer(0), dtype=object)
    for i in range(0, m - 1, 2):
        comps[i + 1, i] = sp.Integer(1)
        comps[i, i + 1] = sp.Integer(-1)
    return TensorField(coords, "ud", comps)


def paper_kenmotsu() -> ZooEntry:
    """The worked 3-d Kenmotsu manifold: {z > 1} in R^3 with
    g = e^{2z}(dx^2 + dy^2) + dz^2, xi = d/dz, eta = dz."""
    chart = Chart(["x", "y", "z"], ["z > 1"])
    g = MetricField(
        TensorField.from_strings(
            chart.coords,
            "dd",
            [["exp(2*z)", "0", "0"], ["0", "exp(2*z)", "0"], ["0", "0", "1"]],
        )
    )
    phi = TensorField.from_strings(
        chart.coords, "ud", [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]]
    )
    xi = TensorField.from_strings(chart.coords, "u", ["0", "0", "1"])
    eta = TensorField.from_strings(chart.coords, "d", ["0", "0", "1"])
    structure = AlmostContactStructure(chart, phi, xi, eta, g)
    frame = [
        TensorField.from_strings(chart.coords, "u", ["exp(-z)", "0", "0"]),
        TensorField.from_strings(chart.coords, "u", ["0", "exp(-z)", "0"]),
        TensorField.from_strings(chart.coords, "u", ["0", "0", "1"]),
    ]
    v = TensorField.from_strings(chart.coords, "u", ["0", "0", "exp(z)"])
    candidates = [
        SolitonCandidate("v-riemann", v, chart.parse("2*exp(z) - 1"), "riemann", collinear=True),
        SolitonCandidate("v-ricci", v, chart.parse("exp(z) - 2"), "ricci", collinear=True),
        SolitonCandidate("xi-riemann", xi, chart.parse("0"), "riemann", collinear=True),
        SolitonCandidate("xi-ricci", xi, chart.parse("0"), "ricci", collinear=True),
        SolitonCandidate("xi-yamabe", xi, chart.parse("0"), "yamabe", collinear=True),
    ]
    plan = SamplePlan(
        {
            "x": GridAxis(-1.0, 1.0, 5),
            "y": GridAxis(-1.0, 1.0, 5),
            "z": GridAxis(1.1, 2.0, 5),
        },
        random_points=25,
        seed=42,
    )
    expected = [
        ExpectedValue("connection-e1e1", "nabla_E1 E1 = -E3 = nabla_E2 E2", "paper"),
        ExpectedValue("connection-e1e3", "nabla_E1 E3 = E1", "paper"),
        ExpectedValue("connection-e2e3", "nabla_E2 E3 = E2", "paper"),
        ExpectedValue("curvature-1221", "R(E1,E2)E2 = -E1", "paper"),
        ExpectedValue("curvature-1331", "R(E1,E3)E3 = -E1", "paper"),
        ExpectedValue("curvature-2112", "R(E2,E1)E1 = -E2", "paper"),
        ExpectedValue("curvature-2332", "R(E2,E3)E3 = -E2", "paper"),
        ExpectedValue("curvature-3113", "R(E3,E1)E1 = -E3", "paper"),
        ExpectedValue("curvature-3223", "R(E3,E2)E2 = -E3", "paper"),
        ExpectedValue("ricci-diagonal", "Ric(E_i, E_i) = -2", "paper"),
        ExpectedValue("scalar-curvature", "scal = -6", "derived"),
        ExpectedValue("lie-v-g-diagonal", "(L_V g)(E_i, E_i) = 2 e^z", "paper"),
        ExpectedValue("riemann-soliton", "(e^z d/dz, 2e^z - 1) is an almost Riemann soliton", "paper"),
        ExpectedValue("ricci-soliton", "(e^z d/dz, e^z - 2) is an almost Ricci soliton", "paper"),
        ExpectedValue("alpha-beta", "(alpha, beta) = (1, 0), class Kenmotsu", "paper"),
        ExpectedValue("transfer-lambda", "2 lambda - div V equals the Ricci lambda", "paper"),
    ]
    entry = ZooEntry(
        name="paper-kenmotsu",
        chart=chart,
        metric=g,
        structure=structure,
        alpha=chart.parse("1"),
        beta=chart.parse("0"),
        candidates=candidates,
        plan=plan,
        frame=frame,
        expected=expected,
    )
    entry.self_validate()
    return entry


def flat_cosymplectic(m: int = 3) -> ZooEntry:
    """Identity metric on R^m with the standard rotating phi; alpha = beta = 0."""
    if m % 2 == 0 or m < 3:
        raise ZooError("flat cosymplectic entries need odd dimension >= 3")
    coords = [f"x{i}" for i in range(1, m)] + ["z"]
    chart = Chart(coords)
    comps = np.full((m, m), sp.Integer(0), dtype=object)
    for i in range(m):
        comps[i, i] = sp.Integer(1)
    g = MetricField(TensorField(coords, "dd", comps))
    phi = _rotating_phi(coords)
    xi_c = [sp.Integer(0)] * m
    xi_c[-1] = sp.Integer(1)
    xi = TensorField(coords, "u", xi_c)
    eta = TensorField(coords, "d", xi_c)
    structure = AlmostContactStructure(chart, phi, xi, eta, g)
    candidates = [
        SolitonCandidate("xi-riemann", xi, chart.zero(), "riemann", collinear=True),
        SolitonCandidate("xi-ricci", xi, chart.zero(), "ricci", collinear=True),
        SolitonCandidate("xi-yamabe", xi, chart.zero(), "yamabe", collinear=True),
    ]
    plan = SamplePlan(
        {c: GridAxis(-1.0, 1.0, 3 if m <= 3 else 2) for c in coords},
        random_points=10,
        seed=42,
    )
    expected = [
        ExpectedValue("flat-curvature", "R = 0, Ric = 0, scal = 0", "trivial"),
        ExpectedValue(
            "triple-soliton",
            "(xi, 0) passes Riemann, Ricci and Yamabe simultaneously",
            "paper",
        ),
        ExpectedValue("div-xi", "div xi = 0", "trivial"),
    ]
    entry = ZooEntry(
        name=f"flat-cosymplectic-{m}",
        chart=chart,
        metric=g,
        structure=structure,
        alpha=chart.zero(),
        beta=chart.zero(),
        candidates=candidates,
        plan=plan,
        expected=expected,
    )
    entry.self_validate()
    return entry


def alpha_kenmotsu_family(alpha0: float) -> ZooEntry:
    """Warped metric e^{2 a z}(dx^2 + dy^2) + dz^2 for a constant a != 0."""
    if alpha0 == 0:
        raise ZooError("alpha0 must be nonzero; use flat_cosymplectic for (0, 0)")
    a = sp.nsimplify(alpha0, rational=True)
    chart = Chart(["x", "y", "z"])
    w = sp.exp(2 * a * sp.Symbol("z"))
    comps = np.array(
        [[w, sp.Integer(0), sp.Integer(0)],
         [sp.Integer(0), w, sp.Integer(0)],
         [sp.Integer(0), sp.Integer(0), sp.Integer(1)]],
        dtype=object,
    )
    g = MetricField(TensorField(chart.coords, "dd", comps))
    phi = TensorField.from_strings(
        chart.coords, "ud", [["0", "-1", "0"], ["1", "0", "0"], ["0", "0", "0"]]
    )
    xi = TensorField.from_strings(chart.coords, "u", ["0", "0", "1"])
    eta = TensorField.from_strings(chart.coords, "d", ["0", "0", "1"])
    structure = AlmostContactStructure(chart, phi, xi, eta, g)
    plan = SamplePlan(
        {
            "x": GridAxis(-1.0, 1.0, 3),
            "y": GridAxis(-1.0, 1.0, 3),
            "z": GridAxis(-0.5, 0.5, 3),
        },
        random_points=10,
        seed=42,
    )
    expected = [
        ExpectedValue("alpha-beta", f"(alpha, beta) = ({alpha0}, 0)", "derived"),
        ExpectedValue(
            "ric-xi-xi", f"Ric(xi, xi) = -2 alpha0^2 = {-2 * alpha0 ** 2}", "derived"
        ),
    ]
    entry = ZooEntry(
        name=f"alpha-kenmotsu-{alpha0:g}",
        chart=chart,
        metric=g,
        structure=structure,
        alpha=ScalarExpr(a, chart.coords),
        beta=chart.zero(),
        candidates=[],
        plan=plan,
        expected=expected,
    )
    entry.self_validate()
    return entry


def sasakian_r3() -> ZooEntry:
    """Standard contact metric structure on R^3:
    eta = (dz - y dx)/2, xi = 2 d/dz, g = eta(x)eta + (dx^2 + dy^2)/4.

    Admitted only if the engine itself verifies the axioms and fits
    (alpha, beta) = (0, 1); no curvature value is hard-coded."""
    chart = Chart(["x", "y", "z"])
    g = MetricField(
        TensorField.from_strings(
            chart.coords,
            "dd",
            [
                ["(1 + y^2)/4", "0", "-y/4"],
                ["0", "1/4", "0"],
                ["-y/4", "0", "1/4"],
            ],
        )
    )
    phi = TensorField.from_strings(
        chart.coords, "ud", [["0", "1", "0"], ["-1", "0", "0"], ["0", "y", "0"]]
    )
    xi = TensorField.from_strings(chart.coords, "u", ["0", "0", "2"])
    eta = TensorField.from_strings(chart.coords, "d", ["-y/2", "0", "1/2"])
    structure = AlmostContactStructure(chart, phi, xi, eta, g)
    plan = SamplePlan(
        {c: GridAxis(-1.0, 1.0, 3) for c in chart.coords}, random_points=10, seed=42
    )
    expected = [
        ExpectedValue("alpha-beta", "(alpha, beta) = (0, 1), class Sasakian", "derived"),
    ]
    entry = ZooEntry(
        name="sasakian-r3",
        chart=chart,
        metric=g,
        structure=structure,
        alpha=chart.zero(),
        beta=chart.one(),
        candidates=[],
        plan=plan,
        expected=expected,
    )
    entry.self_validate()
    profile = entry.profile()
    if profile.class_tag != "Sasakian":
        raise ZooError(
            f"sasakian-r3 self-validation classified the structure as "
            f"{profile.class_tag!r}, expected 'Sasakian'"
        )
    return entry


_FACTORIES = {
    "paper-kenmotsu": paper_kenmotsu,
    "flat-cosymplectic-3": lambda: flat_cosymplectic(3),
    "flat-cosymplectic-5": lambda: flat_cosymplectic(5),
    "alpha-kenmotsu-2": lambda: alpha_kenmotsu_family(2.0),
    "sasakian-r3": sasakian_r3,
}


def names() -> list[str]:
    return sorted(_FACTORIES)


@lru_cache(maxsize=None)
def load(name: str) -> ZooEntry:
    if name not in _FACTORIES:
        raise ZooError(f"unknown zoo entry {name!r}; available: {names()}")
    return _FACTORIES[name]()
