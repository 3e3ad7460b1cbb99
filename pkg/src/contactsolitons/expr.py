"""Closed-form scalar fields on a coordinate chart.

A :class:`ScalarExpr` wraps a sympy tree restricted to the grammar accepted by
manifold spec files: ``+ - * / ^`` (rational powers), ``exp``, ``log``,
``sin``, ``cos``, bare coordinate names and numeric constants.  Derivatives
are exact (algebraic rule per node), evaluation is plain floating point.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, Union

import sympy as sp
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

_TRANSFORMS = standard_transformations + (convert_xor,)
_FUNCTIONS = {"exp": sp.exp, "log": sp.log, "sin": sp.sin, "cos": sp.cos}
_ALLOWED_FUNC_HEADS = (sp.exp, sp.log, sp.sin, sp.cos)

Number = Union[int, float]


class ExpressionError(ValueError):
    """Malformed expression text, unknown coordinate or unsupported function."""


class EvaluationError(ArithmeticError):
    """Evaluation left the domain: log of a non-positive value, division by
    zero, a fractional power of a negative number, or overflow."""


class DomainError(ValueError):
    """A point violates the chart's inequality constraints."""


def _normalize_text(text: str) -> str:
    # tolerate unicode minus/dots pasted from documents
    return text.replace("−", "-").replace("⋅", "*").replace("·", "*")


class ScalarExpr:
    """Immutable scalar field over named chart coordinates."""

    __slots__ = ("sym", "coords", "_fn")

    def __init__(self, sym, coords: Iterable[str]):
        self.coords = tuple(coords)
        self.sym = sp.sympify(sym)
        unknown = {str(s) for s in self.sym.free_symbols} - set(self.coords)
        if unknown:
            raise ExpressionError(
                f"unknown coordinate(s) {sorted(unknown)}; chart has {list(self.coords)}"
            )
        self._fn = None

    # -- construction -----------------------------------------------------

    @classmethod
    def parse(cls, text: str, coords: Iterable[str]) -> "ScalarExpr":
        coords = tuple(coords)
        local = {name: sp.Symbol(name) for name in coords}
        local.update(_FUNCTIONS)
        try:
            sym = parse_expr(
                _normalize_text(text), local_dict=local, transformations=_TRANSFORMS
            )
        except (SyntaxError, TypeError, sp.SympifyError) as exc:
            raise ExpressionError(f"cannot parse expression {text!r}: {exc}") from exc
        for applied in sym.atoms(sp.Function):
            if not isinstance(applied, _ALLOWED_FUNC_HEADS):
                raise ExpressionError(
                    f"unsupported function {applied.func} in {text!r}; "
                    "allowed: exp, log, sin, cos"
                )
        return cls(sym, coords)

    @classmethod
    def constant(cls, value: Number, coords: Iterable[str]) -> "ScalarExpr":
        return cls(sp.sympify(value), coords)

    @classmethod
    def coordinate(cls, name: str, coords: Iterable[str]) -> "ScalarExpr":
        coords = tuple(coords)
        if name not in coords:
            raise ExpressionError(f"{name!r} is not a chart coordinate")
        return cls(sp.Symbol(name), coords)

    # -- calculus ---------------------------------------------------------

    def differentiate(self, coord: str) -> "ScalarExpr":
        """Exact partial derivative with respect to a chart coordinate."""
        if coord not in self.coords:
            raise ExpressionError(f"{coord!r} is not a chart coordinate")
        return ScalarExpr(sp.diff(self.sym, sp.Symbol(coord)), self.coords)

    def evaluate(self, point: Sequence[Number]) -> float:
        """Numeric value at a point given in coordinate order."""
        if len(point) != len(self.coords):
            raise EvaluationError(
                f"point has {len(point)} components, chart has {len(self.coords)}"
            )
        if self._fn is None:
            self._fn = sp.lambdify(
                [sp.Symbol(c) for c in self.coords], self.sym, modules="math"
            )
        try:
            value = float(self._fn(*[float(v) for v in point]))
        except (ValueError, ZeroDivisionError, OverflowError, TypeError) as exc:
            raise EvaluationError(f"cannot evaluate {self.sym} at {list(point)}: {exc}") from exc
        if not math.isfinite(value):
            raise EvaluationError(f"{self.sym} is not finite at {list(point)}")
        return value

    def simplify(self) -> "ScalarExpr":
        """Value-preserving cleanup; no canonical form is promised."""
        return ScalarExpr(sp.simplify(self.sym), self.coords)

    # -- algebra ----------------------------------------------------------

    def _coerce(self, other) -> "ScalarExpr":
        if isinstance(other, ScalarExpr):
            if other.coords != self.coords:
                raise ExpressionError("operands live on different charts")
            return other
        return ScalarExpr(sp.sympify(other), self.coords)

    def __add__(self, other):
        return ScalarExpr(self.sym + self._coerce(other).sym, self.coords)

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarExpr(self.sym - self._coerce(other).sym, self.coords)

    def __rsub__(self, other):
        return ScalarExpr(self._coerce(other).sym - self.sym, self.coords)

    def __mul__(self, other):
        return ScalarExpr(self.sym * self._coerce(other).sym, self.coords)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ScalarExpr(self.sym / self._coerce(other).sym, self.coords)

    def __rtruediv__(self, other):
        return ScalarExpr(self._coerce(other).sym / self.sym, self.coords)

    def __pow__(self, other):
        return ScalarExpr(self.sym ** self._coerce(other).sym, self.coords)

    def __neg__(self):
        return ScalarExpr(-self.sym, self.coords)

    @property
    def is_zero(self) -> bool:
        return self.sym == 0

    def text(self) -> str:
        """Expression as spec-file text (sympy str form, ``**`` powers)."""
        return sp.sstr(self.sym)

    def __repr__(self):
        return f"ScalarExpr({self.sym})"

    def __eq__(self, other):
        return (
            isinstance(other, ScalarExpr)
            and self.coords == other.coords
            and self.sym == other.sym
        )

    def __hash__(self):
        return hash((self.coords, self.sym))


_REL_KINDS = {
    sp.StrictGreaterThan: (">", True),
    sp.GreaterThan: (">=", False),
    sp.StrictLessThan: ("<", True),
    sp.LessThan: ("<=", False),
}


class Chart:
    """Named coordinates plus the inequality constraints of the chart domain."""

    def __init__(self, coords: Iterable[str], constraints: Iterable[str] = ()):
        self.coords = tuple(coords)
        if len(set(self.coords)) != len(self.coords):
            raise ExpressionError("duplicate coordinate names")
        self.constraint_texts: tuple[str, ...] = tuple(constraints)
        self._gaps: list[tuple[ScalarExpr, bool]] = []
        local = {name: sp.Symbol(name) for name in self.coords}
        for text in self.constraint_texts:
            try:
                rel = parse_expr(
                    _normalize_text(text), local_dict=local, transformations=_TRANSFORMS
                )
            except (SyntaxError, TypeError, sp.SympifyError) as exc:
                raise ExpressionError(f"cannot parse constraint {text!r}: {exc}") from exc
            kind = _REL_KINDS.get(type(rel))
            if kind is None:
                raise ExpressionError(
                    f"constraint {text!r} must be an inequality (<, <=, >, >=)"
                )
            op, strict = kind
            gap = rel.lhs - rel.rhs if op in (">", ">=") else rel.rhs - rel.lhs
            self._gaps.append((ScalarExpr(gap, self.coords), strict))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def contains(self, point: Sequence[Number]) -> bool:
        if len(point) != self.dim:
            return False
        for gap, strict in self._gaps:
            try:
                value = gap.evaluate(point)
            except EvaluationError:
                return False
            if (value <= 0.0) if strict else (value < 0.0):
                return False
        return True

    def require(self, point: Sequence[Number]) -> None:
        if not self.contains(point):
            raise DomainError(
                f"point {list(point)} violates the chart domain "
                f"{list(self.constraint_texts)}"
            )

    def parse(self, text: str) -> ScalarExpr:
        return ScalarExpr.parse(text, self.coords)

    def zero(self) -> ScalarExpr:
        return ScalarExpr.constant(0, self.coords)

    def one(self) -> ScalarExpr:
        return ScalarExpr.constant(1, self.coords)

    def __repr__(self):
        return f"Chart({list(self.coords)}, {list(self.constraint_texts)})"
