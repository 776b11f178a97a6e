import numpy as np
import pytest

from galab.errors import ExpressionError
from galab.expressions import (as_function_of_z, constant_value, evaluate,
                               evaluate_on_grid, parse_expression, point_env)

from conftest import make_grid


def value_at(src, x, y):
    node = parse_expression(src)
    return complex(evaluate(node, point_env(complex(x, y))))


class TestLiteralsAndVariables:
    def test_plain_numbers(self):
        assert value_at("1.5", 0, 0) == 1.5
        assert value_at("2e-3", 0, 0) == 0.002
        assert value_at(".5", 0, 0) == 0.5

    def test_imaginary_literals(self):
        assert value_at("2i", 0, 0) == 2j
        assert value_at("1.5i", 0, 0) == 1.5j
        assert value_at("2i*y", 0, 3) == 6j

    def test_variables(self):
        assert value_at("z", 1, 2) == 1 + 2j
        assert value_at("zbar", 1, 2) == 1 - 2j
        assert value_at("x + 2*y", 1, 2) == 5.0

    def test_unknown_identifier(self):
        with pytest.raises(ExpressionError):
            parse_expression("w + 1")

    def test_unknown_function(self):
        with pytest.raises(ExpressionError):
            parse_expression("sin(x)")


class TestPrecedence:
    def test_power_binds_tighter_than_unary_minus(self):
        assert value_at("-x^2", 2, 0) == -4.0

    def test_power_right_assoc_tower(self):
        assert value_at("2^3^2", 0, 0) == 512.0

    def test_negative_exponent(self):
        assert value_at("x^-2", 2, 0) == 0.25

    def test_mul_over_add(self):
        assert value_at("1 + 2*3", 0, 0) == 7.0

    def test_left_assoc_division(self):
        assert value_at("8/4/2", 0, 0) == 1.0

    def test_parentheses(self):
        assert value_at("(1 + 2)*3", 0, 0) == 9.0

    def test_non_integer_exponent_rejected(self):
        with pytest.raises(ExpressionError):
            parse_expression("x^2.5")
        with pytest.raises(ExpressionError):
            parse_expression("x^y")


class TestFunctions:
    def test_exp_conj_re_im_sqrt(self):
        assert value_at("exp(0)", 0, 0) == 1.0
        assert value_at("conj(z)", 1, 2) == 1 - 2j
        assert value_at("re(z)", 1, 2) == 1.0
        assert value_at("im(z)", 1, 2) == 2.0
        assert value_at("sqrt(4)", 0, 0) == 2.0

    def test_spot_check_singular_expression(self):
        assert value_at("exp(2i*y^2) * (-1/(2*x))", 1, 0) == pytest.approx(-0.5)


class TestErrors:
    def test_dangling_operator_position(self):
        with pytest.raises(ExpressionError) as err:
            parse_expression("1 +")
        assert err.value.column == 4

    def test_unbalanced_paren(self):
        with pytest.raises(ExpressionError):
            parse_expression("(1 + 2")

    def test_stray_character(self):
        with pytest.raises(ExpressionError) as err:
            parse_expression("1 @ 2")
        assert err.value.column == 3

    def test_multiline_position(self):
        with pytest.raises(ExpressionError) as err:
            parse_expression("1 +\n* 2")
        assert err.value.line == 2

    def test_trailing_junk(self):
        with pytest.raises(ExpressionError):
            parse_expression("1 2")


class TestEvaluation:
    def test_on_grid(self):
        g = make_grid(8, 8)
        vals = evaluate_on_grid("z*zbar", g)
        assert np.allclose(vals, g.x ** 2 + g.y ** 2)

    def test_division_guarded(self):
        g = make_grid(8, 8, x=(-1.0, 1.0))
        vals = evaluate_on_grid("1/(x - x)", g)  # all infinities, no raise
        assert not np.isfinite(vals).any()

    def test_scalar_broadcast(self):
        g = make_grid(8, 8)
        assert evaluate_on_grid("3", g).shape == g.shape()

    def test_as_function_of_z(self):
        fn = as_function_of_z("z^2 + 1i")
        zs = np.array([1 + 1j, 2.0])
        assert np.allclose(fn(zs), zs ** 2 + 1j)

    def test_constant_value(self):
        assert constant_value("-2i/3") == pytest.approx(-2j / 3)
        with pytest.raises(ExpressionError):
            constant_value("2*x")
