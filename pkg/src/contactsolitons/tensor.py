"""Dense multi-index tensor fields in the coordinate frame.

Components are sympy expressions; the variance signature records, per slot,
whether an index is covariant (``"d"``) or contravariant (``"u"``).  Slot
order always follows the argument order of the defining formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import sympy as sp

from .expr import EvaluationError, ExpressionError, ScalarExpr

COV = "d"
CONTRA = "u"


class TensorError(ValueError):
    """Variance/dimension mismatch or invalid slot index."""


def _as_sym(entry):
    if isinstance(entry, ScalarExpr):
        return entry.sym
    return sp.sympify(entry)


def _tidy(expr):
    # cancel keeps rational/exponential components compact without the cost
    # of full simplify
    return sp.cancel(sp.together(expr))


class TensorField:
    """Immutable valence-(r,s) field of scalar expressions."""

    __slots__ = ("coords", "variance", "comps", "_fn")

    def __init__(self, coords: Iterable[str], variance: Iterable[str], comps):
        self.coords = tuple(coords)
        self.variance = tuple(variance)
        for v in self.variance:
            if v not in (COV, CONTRA):
                raise TensorError(f"variance flags must be 'd' or 'u', got {v!r}")
        m = len(self.coords)
        shape = (m,) * len(self.variance)
        arr = np.empty(shape, dtype=object)
        src = np.asarray(comps, dtype=object)
        if src.shape != shape:
            raise TensorError(f"component array has shape {src.shape}, expected {shape}")
        for idx in np.ndindex(*shape) if shape else [()]:
            arr[idx] = _as_sym(src[idx])
        self.comps = arr
        self._fn = None

    # -- basics -----------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.coords)

    @property
    def rank(self) -> int:
        return len(self.variance)

    def component(self, *idx: int) -> ScalarExpr:
        return ScalarExpr(self.comps[idx], self.coords)

    @classmethod
    def zeros(cls, coords, variance) -> "TensorField":
        m = len(tuple(coords))
        shape = (m,) * len(tuple(variance))
        return cls(coords, variance, np.full(shape, sp.Integer(0), dtype=object))

    @classmethod
    def from_strings(cls, coords, variance, comps) -> "TensorField":
        coords = tuple(coords)
        conv = np.vectorize(
            lambda t: ScalarExpr.parse(t, coords).sym if isinstance(t, str) else _as_sym(t),
            otypes=[object],
        )
        return cls(coords, variance, conv(np.asarray(comps, dtype=object)))

    def map(self, fn: Callable) -> "TensorField":
        out = np.vectorize(fn, otypes=[object])(self.comps)
        return TensorField(self.coords, self.variance, out)

    def tidy(self) -> "TensorField":
        return self.map(_tidy)

    # -- evaluation -------------------------------------------------------

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        """All components at a point, as a float array of shape (m,)*rank."""
        if self._fn is None:
            syms = [sp.Symbol(c) for c in self.coords]
            flat = [self.comps[idx] for idx in np.ndindex(*self.comps.shape)]
            self._fn = sp.lambdify(syms, flat, modules="math")
        try:
            values = self._fn(*[float(v) for v in point])
        except (ValueError, ZeroDivisionError, OverflowError, TypeError) as exc:
            raise EvaluationError(f"cannot evaluate tensor at {list(point)}: {exc}") from exc
        arr = np.asarray(values, dtype=float).reshape(self.comps.shape)
        if not np.all(np.isfinite(arr)):
            raise EvaluationError(f"non-finite tensor component at {list(point)}")
        return arr

    # -- algebra ----------------------------------------------------------

    def _check_compatible(self, other: "TensorField"):
        if not isinstance(other, TensorField):
            raise TensorError("expected a TensorField")
        if other.coords != self.coords or other.variance != self.variance:
            raise TensorError("tensor fields have different charts or variances")

    def __add__(self, other: "TensorField") -> "TensorField":
        self._check_compatible(other)
        return TensorField(self.coords, self.variance, self.comps + other.comps)

    def __sub__(self, other: "TensorField") -> "TensorField":
        self._check_compatible(other)
        return TensorField(self.coords, self.variance, self.comps - other.comps)

    def __neg__(self) -> "TensorField":
        return TensorField(self.coords, self.variance, -self.comps)

    def scale(self, factor) -> "TensorField":
        f = _as_sym(factor)
        return TensorField(self.coords, self.variance, self.comps * f)

    def transpose(self, perm: Sequence[int]) -> "TensorField":
        if sorted(perm) != list(range(self.rank)):
            raise TensorError(f"invalid permutation {perm}")
        variance = tuple(self.variance[p] for p in perm)
        return TensorField(self.coords, variance, np.transpose(self.comps, perm))


def outer(a: TensorField, b: TensorField) -> TensorField:
    """Tensor product; slot order is a's slots then b's."""
    if a.coords != b.coords:
        raise TensorError("tensor fields live on different charts")
    m = a.m
    shape = (m,) * (a.rank + b.rank)
    comps = np.empty(shape, dtype=object)
    for ia in np.ndindex(*a.comps.shape):
        for ib in np.ndindex(*b.comps.shape):
            comps[ia + ib] = a.comps[ia] * b.comps[ib]
    return TensorField(a.coords, a.variance + b.variance, comps)


class MetricField:
    """Symmetric positive-definite (0,2) field with lazy inverse.

    The symbolic inverse backs index raising and Christoffel symbols (those
    must stay exactly differentiable); numeric evaluation points use an LU
    solve for conditioning.
    """

    def __init__(self, tensor: TensorField):
        if tensor.variance != (COV, COV):
            raise TensorError("metric must be a (0,2) tensor field")
        self.tensor = tensor
        self._inverse: TensorField | None = None

    @property
    def coords(self):
        return self.tensor.coords

    @property
    def m(self) -> int:
        return self.tensor.m

    def inverse(self) -> TensorField:
        if self._inverse is None:
            m = self.m
            mat = sp.Matrix(m, m, lambda i, j: self.tensor.comps[i, j])
            inv = mat.inv(method="ADJ")
            comps = np.empty((m, m), dtype=object)
            for i in range(m):
                for j in range(m):
                    comps[i, j] = _tidy(inv[i, j])
            self._inverse = TensorField(self.coords, (CONTRA, CONTRA), comps)
        return self._inverse

    def matrix_at(self, point) -> np.ndarray:
        return self.tensor.evaluate(point)

    def inverse_at(self, point) -> np.ndarray:
        g = self.matrix_at(point)
        try:
            return np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise EvaluationError(f"singular metric at {list(point)}") from exc

    def frame_at(self, point) -> np.ndarray:
        """Orthonormal frame matrix F: column i holds the coordinate
        components of E_i; Cholesky-based, so it matches Gram-Schmidt on the
        coordinate vectors in order."""
        g = self.matrix_at(point)
        try:
            lower = np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise EvaluationError(
                f"metric not positive definite at {list(point)}"
            ) from exc
        return np.linalg.inv(lower).T


# -- structural operations ------------------------------------------------


def kulkarni_nomizu(t1: TensorField, t2: TensorField) -> TensorField:
    """(T1 o T2)(X,Y,Z,W) = T1(X,W)T2(Y,Z) + T1(Y,Z)T2(X,W)
    - T1(X,Z)T2(Y,W) - T1(Y,W)T2(X,Z)."""
    for t in (t1, t2):
        if t.variance != (COV, COV):
            raise TensorError("Kulkarni-Nomizu factors must be (0,2) fields")
    if t1.coords != t2.coords:
        raise TensorError("tensor fields live on different charts")
    m = t1.m
    a, b = t1.comps, t2.comps
    comps = np.empty((m, m, m, m), dtype=object)
    for i, j, k, l in itertools.product(range(m), repeat=4):
        comps[i, j, k, l] = (
            a[i, l] * b[j, k]
            + a[j, k] * b[i, l]
            - a[i, k] * b[j, l]
            - a[j, l] * b[i, k]
        )
    return TensorField(t1.coords, (COV,) * 4, comps)


def contract(t: TensorField, slot_a: int, slot_b: int, g: MetricField | None = None) -> TensorField:
    """Trace over a slot pair; like-variance pairs need the metric."""
    r = t.rank
    if not (0 <= slot_a < r and 0 <= slot_b < r) or slot_a == slot_b:
        raise TensorError(f"invalid slot pair ({slot_a}, {slot_b}) for rank {r}")
    slot_a, slot_b = sorted((slot_a, slot_b))
    va, vb = t.variance[slot_a], t.variance[slot_b]
    weight = None
    if va == vb:
        if g is None:
            raise TensorError("metric required to contract two like-variance slots")
        weight = (g.inverse() if va == COV else g.tensor).comps
    m = t.m
    keep = [s for s in range(r) if s not in (slot_a, slot_b)]
    variance = tuple(t.variance[s] for s in keep)
    shape = (m,) * len(keep)
    comps = np.empty(shape, dtype=object)
    for idx in np.ndindex(*shape) if shape else [()]:
        total = sp.Integer(0)
        for p in range(m):
            for q in range(m):
                if weight is None and p != q:
                    continue
                full = [None] * r
                for pos, s in enumerate(keep):
                    full[s] = idx[pos]
                full[slot_a], full[slot_b] = p, q
                term = t.comps[tuple(full)]
                if weight is not None:
                    term = weight[p, q] * term
                total += term
        comps[idx] = _tidy(total)
    if not shape:
        # rank-0 result: return as a 0-dim field is awkward; keep rank 0
        out = np.empty((), dtype=object)
        out[()] = comps[()]
        return TensorField(t.coords, (), out)
    return TensorField(t.coords, variance, comps)


def raise_lower(t: TensorField, slot: int, g: MetricField) -> TensorField:
    """Flip the variance of one slot via the metric or its inverse."""
    if not (0 <= slot < t.rank):
        raise TensorError(f"invalid slot {slot} for rank {t.rank}")
    m = t.m
    lowering = t.variance[slot] == CONTRA
    weight = (g.tensor if lowering else g.inverse()).comps
    variance = list(t.variance)
    variance[slot] = COV if lowering else CONTRA
    comps = np.empty(t.comps.shape, dtype=object)
    for idx in np.ndindex(*t.comps.shape):
        total = sp.Integer(0)
        for k in range(m):
            src = list(idx)
            src[slot] = k
            total += weight[idx[slot], k] * t.comps[tuple(src)]
        comps[idx] = _tidy(total)
    return TensorField(t.coords, tuple(variance), comps)


def lie_derivative(v: TensorField, t: TensorField) -> TensorField:
    """Lie derivative of a (0,2) field along a vector field:
    (L_V T)_ij = V^k d_k T_ij + T_kj d_i V^k + T_ik d_j V^k."""
    if v.variance != (CONTRA,):
        raise TensorError("direction must be a contravariant rank-1 field")
    if t.variance != (COV, COV):
        raise TensorError("Lie derivative implemented for (0,2) fields")
    if v.coords != t.coords:
        raise TensorError("tensor fields live on different charts")
    m = t.m
    syms = [sp.Symbol(c) for c in t.coords]
    comps = np.empty((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            total = sp.Integer(0)
            for k in range(m):
                total += v.comps[k] * sp.diff(t.comps[i, j], syms[k])
                total += t.comps[k, j] * sp.diff(v.comps[k], syms[i])
                total += t.comps[i, k] * sp.diff(v.comps[k], syms[j])
            comps[i, j] = _tidy(total)
    return TensorField(t.coords, (COV, COV), comps)


# -- numeric frame projection ---------------------------------------------


def lower_all(values: np.ndarray, variance: Sequence[str], gmat: np.ndarray) -> np.ndarray:
    """Numerically lower every contravariant slot of a value array."""
    out = values
    for k, v in enumerate(variance):
        if v == CONTRA:
            out = np.moveaxis(np.tensordot(out, gmat, axes=([k], [0])), -1, k)
    return out


def frame_project(
    values: np.ndarray, variance: Sequence[str], gmat: np.ndarray, frame: np.ndarray
) -> np.ndarray:
    """Components of a tensor value against an orthonormal frame.

    All slots are lowered first; each slot is then contracted with the frame
    columns, so entry (i1..ik) is T(E_{i1},...,E_{ik})."""
    vals = lower_all(values, variance, gmat)
    for _ in range(vals.ndim):
        vals = np.tensordot(vals, frame, axes=([0], [0]))
    return vals
