"""Levi-Civita connection and curvature machinery.

Sign conventions (fixed by the worked 3-d hyperbolic-warped example):
    R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
    Ric(Y,Z) = trace(X -> R(X,Y)Z)
Lowered curvature slots are stored in argument order (X, Y, Z, W) with
R(X,Y,Z,W) = g(R(X,Y)Z, W).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import sympy as sp

from .expr import ScalarExpr
from .tensor import (
    CONTRA,
    COV,
    MetricField,
    TensorField,
    TensorError,
    _tidy,
    kulkarni_nomizu,
)


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Connection:
    """Christoffel symbols Gamma^k_ij, stored as gamma[k, i, j]."""

    coords: tuple
    gamma: np.ndarray  # (m, m, m) object array of sympy expressions

    @property
    def m(self) -> int:
        return len(self.coords)

    def symbol(self, k: int, i: int, j: int) -> ScalarExpr:
        return ScalarExpr(self.gamma[k, i, j], self.coords)

    def evaluate(self, point) -> np.ndarray:
        field = TensorField(self.coords, (CONTRA, COV, COV), self.gamma)
        return field.evaluate(point)


def christoffel(g: MetricField) -> Connection:
    """Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)."""
    m = g.m
    syms = [sp.Symbol(c) for c in g.coords]
    gc = g.tensor.comps
    ginv = g.inverse().comps
    dg = np.empty((m, m, m), dtype=object)  # dg[l, i, j] = d_l g_ij
    for l, i, j in itertools.product(range(m), repeat=3):
        dg[l, i, j] = sp.diff(gc[i, j], syms[l])
    gamma = np.empty((m, m, m), dtype=object)
    for k, i, j in itertools.product(range(m), repeat=3):
        total = sp.Integer(0)
        for l in range(m):
            total += ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
        gamma[k, i, j] = _tidy(total / 2)
    return Connection(g.coords, gamma)


def covariant_derivative(t: TensorField, conn: Connection) -> TensorField:
    """One extra covariant slot in front (the direction);
    +Gamma per contravariant index, -Gamma per covariant index."""
    if t.coords != conn.coords:
        raise TensorError("tensor and connection live on different charts")
    m = t.m
    syms = [sp.Symbol(c) for c in t.coords]
    shape = (m,) * (t.rank + 1)
    comps = np.empty(shape, dtype=object)
    for full in np.ndindex(*shape):
        d, idx = full[0], full[1:]
        total = sp.diff(t.comps[idx] if idx else t.comps[()], syms[d])
        for slot, v in enumerate(t.variance):
            for a in range(m):
                swapped = list(idx)
                swapped[slot] = a
                if v == CONTRA:
                    total += conn.gamma[idx[slot], d, a] * t.comps[tuple(swapped)]
                else:
                    total -= conn.gamma[a, d, idx[slot]] * t.comps[tuple(swapped)]
        comps[full] = _tidy(total)
    return TensorField(t.coords, (COV,) + t.variance, comps)


@dataclass(frozen=True)
class CurvatureBundle:
    """Curvature data of one metric.

    ``riemann_up`` holds (R(d_i, d_j) d_k)^l at [i, j, k, l];
    ``riemann_low`` holds g(R(d_i, d_j) d_k, d_l) at [i, j, k, l]."""

    metric: MetricField
    connection: Connection
    riemann_up: TensorField    # variance (d, d, d, u)
    riemann_low: TensorField   # variance (d, d, d, d)
    ricci: TensorField         # variance (d, d)
    ricci_operator: TensorField  # variance (u, d), Q^i_j
    scalar: ScalarExpr

    @property
    def m(self) -> int:
        return self.metric.m

    @property
    def coords(self):
        return self.metric.coords


def riemann(g: MetricField) -> CurvatureBundle:
    """Full curvature bundle: R, Ric, Q and scalar curvature."""
    conn = christoffel(g)
    m = g.m
    syms = [sp.Symbol(c) for c in g.coords]
    gam = conn.gamma
    up = np.empty((m, m, m, m), dtype=object)
    for i, j, k in itertools.product(range(m), repeat=3):
        for l in range(m):
            total = sp.diff(gam[l, j, k], syms[i]) - sp.diff(gam[l, i, k], syms[j])
            for a in range(m):
                total += gam[l, i, a] * gam[a, j, k] - gam[l, j, a] * gam[a, i, k]
            up[i, j, k, l] = _tidy(total)
    low = np.empty((m, m, m, m), dtype=object)
    gc = g.tensor.comps
    for i, j, k, l in itertools.product(range(m), repeat=4):
        total = sp.Integer(0)
        for a in range(m):
            total += gc[l, a] * up[i, j, k, a]
        low[i, j, k, l] = _tidy(total)
    ric = np.empty((m, m), dtype=object)
    for j, k in itertools.product(range(m), repeat=2):
        total = sp.Integer(0)
        for i in range(m):
            total += up[i, j, k, i]
        ric[j, k] = _tidy(total)
    ginv = g.inverse().comps
    q = np.empty((m, m), dtype=object)
    for i, j in itertools.product(range(m), repeat=2):
        total = sp.Integer(0)
        for k in range(m):
            total += ginv[i, k] * ric[k, j]
        q[i, j] = _tidy(total)
    scal = sp.Integer(0)
    for j, k in itertools.product(range(m), repeat=2):
        scal += ginv[j, k] * ric[j, k]
    return CurvatureBundle(
        metric=g,
        connection=conn,
        riemann_up=TensorField(g.coords, (COV, COV, COV, CONTRA), up),
        riemann_low=TensorField(g.coords, (COV,) * 4, low),
        ricci=TensorField(g.coords, (COV, COV), ric),
        ricci_operator=TensorField(g.coords, (CONTRA, COV), q),
        scalar=ScalarExpr(_tidy(scal), g.coords),
    )


def weyl(bundle: CurvatureBundle) -> TensorField:
    """Trace-free part of the curvature under the standard decomposition:
    W = R + scal/(2(m-1)(m-2)) g o g - 1/(m-2) Ric o g."""
    m = bundle.m
    if m < 3:
        raise GeometryError("Weyl tensor requires dimension >= 3")
    g = bundle.metric.tensor
    gg = kulkarni_nomizu(g, g)
    ric_g = kulkarni_nomizu(bundle.ricci, g)
    scal = bundle.scalar.sym
    w = (
        bundle.riemann_low
        + gg.scale(scal / (2 * (m - 1) * (m - 2)))
        + ric_g.scale(sp.Rational(-1, m - 2))
    )
    return w.tidy()


def gradient(f: ScalarExpr, g: MetricField) -> TensorField:
    """grad f = g^{ij} d_j f d_i."""
    m = g.m
    syms = [sp.Symbol(c) for c in g.coords]
    ginv = g.inverse().comps
    comps = np.empty((m,), dtype=object)
    for i in range(m):
        total = sp.Integer(0)
        for j in range(m):
            total += ginv[i, j] * sp.diff(f.sym, syms[j])
        comps[i] = _tidy(total)
    return TensorField(g.coords, (CONTRA,), comps)


def divergence(v: TensorField, conn: Connection) -> ScalarExpr:
    """div V = d_i V^i + Gamma^i_{ik} V^k."""
    if v.variance != (CONTRA,):
        raise TensorError("divergence expects a vector field")
    m = v.m
    syms = [sp.Symbol(c) for c in v.coords]
    total = sp.Integer(0)
    for i in range(m):
        total += sp.diff(v.comps[i], syms[i])
        for k in range(m):
            total += conn.gamma[i, i, k] * v.comps[k]
    return ScalarExpr(_tidy(total), v.coords)


def directional_derivative(f: ScalarExpr, v: TensorField) -> ScalarExpr:
    """V(f) = V^i d_i f."""
    syms = [sp.Symbol(c) for c in f.coords]
    total = sp.Integer(0)
    for i in range(len(syms)):
        total += v.comps[i] * sp.diff(f.sym, syms[i])
    return ScalarExpr(_tidy(total), f.coords)


def curvature_action_on_ric(bundle: CurvatureBundle, xi: TensorField) -> TensorField:
    """D(X,Y,Z) = Ric(R(xi,X)Y, Z) + Ric(Y, R(xi,X)Z).

    Its vanishing is the hypothesis R(xi, .) . Ric = 0."""
    if xi.variance != (CONTRA,):
        raise TensorError("xi must be a vector field")
    m = bundle.m
    up = bundle.riemann_up.comps
    ric = bundle.ricci.comps
    # (R(xi, d_x) d_y)^l
    rxi = np.empty((m, m, m), dtype=object)
    for x, y, l in itertools.product(range(m), repeat=3):
        total = sp.Integer(0)
        for a in range(m):
            total += xi.comps[a] * up[a, x, y, l]
        rxi[x, y, l] = _tidy(total)
    comps = np.empty((m, m, m), dtype=object)
    for x, y, z in itertools.product(range(m), repeat=3):
        total = sp.Integer(0)
        for a in range(m):
            total += rxi[x, y, a] * ric[a, z] + rxi[x, z, a] * ric[y, a]
        comps[x, y, z] = _tidy(total)
    return TensorField(bundle.coords, (COV, COV, COV), comps)
