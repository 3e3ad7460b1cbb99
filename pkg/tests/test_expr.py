import math
import random

import numpy as np
import pytest

from contactsolitons.expr import (
    Chart,
    DomainError,
    EvaluationError,
    ExpressionError,
    ScalarExpr,
)

COORDS = ("x", "y", "z")


def parse(text):
    return ScalarExpr.parse(text, COORDS)


def fd_derivative(expr, point, axis, h=1e-5):
    lo, hi = list(point), list(point)
    lo[axis] -= h
    hi[axis] += h
    return (expr.evaluate(hi) - expr.evaluate(lo)) / (2 * h)


class TestParse:
    def test_basic_arithmetic(self):
        e = parse("x^2 + 3*y - z/2")
        assert e.evaluate([2.0, 1.0, 4.0]) == pytest.approx(4 + 3 - 2)

    def test_known_functions(self):
        e = parse("exp(x) * sin(y) + log(z) + cos(x)")
        v = e.evaluate([0.5, 0.3, 2.0])
        expect = math.exp(0.5) * math.sin(0.3) + math.log(2.0) + math.cos(0.5)
        assert v == pytest.approx(expect, rel=1e-14)

    def test_unknown_symbol_rejected(self):
        with pytest.raises(ExpressionError):
            parse("x + w")

    def test_unknown_function_rejected(self):
        with pytest.raises(ExpressionError):
            parse("tanh(x)")

    def test_malformed_rejected(self):
        with pytest.raises(ExpressionError):
            parse("x + * y")

    def test_text_round_trip(self):
        e = parse("exp(2*z) + x*y")
        again = parse(e.text())
        for _ in range(10):
            p = [random.uniform(-1, 1) for _ in COORDS]
            assert e.evaluate(p) == again.evaluate(p)


def _random_expr(rng, depth):
    """Seeded random grammar over terms smooth on [0.5, 1.5]^3."""
    if depth == 0:
        choice = rng.randrange(4)
        if choice == 3:
            return str(rng.randint(1, 5))
        return COORDS[choice]
    a = _random_expr(rng, depth - 1)
    b = _random_expr(rng, depth - 1)
    op = rng.randrange(6)
    if op == 0:
        return f"({a} + {b})"
    if op == 1:
        return f"({a} - {b})"
    if op == 2:
        return f"({a} * {b})"
    if op == 3:
        return f"sin({a})"
    if op == 4:
        return f"cos({a})"
    return f"exp(sin({a}))"


class TestDifferentiation:
    def test_derivative_matches_finite_difference(self):
        # 1000 random expressions against a central-difference oracle
        rng = random.Random(42)
        for _ in range(1000):
            text = _random_expr(rng, rng.randint(1, 3))
            expr = parse(text)
            point = [rng.uniform(0.5, 1.5) for _ in COORDS]
            axis = rng.randrange(3)
            sym = expr.differentiate(COORDS[axis]).evaluate(point)
            num = fd_derivative(expr, point, axis)
            assert abs(sym - num) <= 1e-5 * (1.0 + abs(sym)), text

    def test_second_derivative_exponential(self):
        # frozen from the finite-difference oracle: d^2/dz^2 exp(2z) at z=1.5
        e = parse("exp(2*z)")
        d2 = e.differentiate("z").differentiate("z")
        assert d2.evaluate([0.0, 0.0, 1.5]) == pytest.approx(80.34214769, abs=1e-6)
        assert d2.evaluate([0.0, 0.0, 1.5]) == pytest.approx(4 * math.exp(3.0), rel=1e-14)

    def test_linearity(self):
        rng = random.Random(7)
        f = parse("exp(x)*sin(y) + z^3")
        g = parse("cos(x*z) - y^2")
        lhs = (f * 3.0 + g * (-2.0)).differentiate("x")
        rhs = f.differentiate("x") * 3.0 - g.differentiate("x") * 2.0
        for _ in range(50):
            p = [rng.uniform(-1, 1) for _ in COORDS]
            assert abs(lhs.evaluate(p) - rhs.evaluate(p)) <= 1e-12

    def test_product_rule(self):
        f = parse("exp(2*z)")
        g = parse("sin(z)")
        lhs = (f * g).differentiate("z")
        rhs = f.differentiate("z") * g + f * g.differentiate("z")
        for zv in np.linspace(-1, 1, 20):
            p = [0.0, 0.0, float(zv)]
            assert abs(lhs.evaluate(p) - rhs.evaluate(p)) <= 1e-12

    def test_depth_three_chain(self):
        e = parse("exp(sin(cos(x*y) + z))")
        p = [0.7, 0.9, 1.1]
        for axis in range(3):
            sym = e.differentiate(COORDS[axis]).evaluate(p)
            num = fd_derivative(e, p, axis)
            assert abs(sym - num) <= 1e-5 * (1.0 + abs(sym))


class TestSimplify:
    def test_simplify_preserves_values(self):
        rng = random.Random(11)
        e = parse("(x^2 - y^2)/(x - y) + sin(z)^2 + cos(z)^2")
        s = e.simplify()
        count = 0
        while count < 100:
            p = [rng.uniform(-2, 2) for _ in COORDS]
            if abs(p[0] - p[1]) < 1e-3:
                continue
            count += 1
            assert abs(e.evaluate(p) - s.evaluate(p)) <= 1e-12 * (1 + abs(e.evaluate(p)))

    def test_is_zero(self):
        assert parse("x - x").is_zero
        assert not parse("x - y").is_zero


class TestEvaluate:
    def test_evaluation_error_on_log_negative(self):
        e = parse("log(z)")
        with pytest.raises(EvaluationError):
            e.evaluate([0.0, 0.0, -1.0])

    def test_evaluation_error_on_division_by_zero(self):
        e = parse("1/z")
        with pytest.raises(EvaluationError):
            e.evaluate([0.0, 0.0, 0.0])

    def test_wrong_arity(self):
        e = parse("x + y")
        with pytest.raises(EvaluationError):
            e.evaluate([1.0])


class TestChart:
    def test_contains(self):
        chart = Chart(COORDS, ["z > 0", "x < 2"])
        assert chart.contains([0.0, 0.0, 1.0])
        assert not chart.contains([0.0, 0.0, -1.0])
        assert not chart.contains([3.0, 0.0, 1.0])

    def test_require_raises(self):
        chart = Chart(COORDS, ["z > 0"])
        chart.require([0.0, 0.0, 0.5])
        with pytest.raises(DomainError):
            chart.require([0.0, 0.0, 0.0])

    def test_non_strict_constraint(self):
        chart = Chart(COORDS, ["z >= 1"])
        assert chart.contains([0.0, 0.0, 1.0])
        assert not chart.contains([0.0, 0.0, 0.999])

    def test_bad_constraint(self):
        with pytest.raises(ExpressionError):
            Chart(COORDS, ["z ~ 0"])

    def test_duplicate_coords_rejected(self):
        with pytest.raises(ExpressionError):
            Chart(("x", "x", "z"))
