from fractions import Fraction

import pytest

from dsloc.algebra import (Presentation, SuperPoly, eliminate_unit_monomial, parity_of, substitute_zero,
                           transfer)
from dsloc.errors import NotInvertibleError, PresentationError
from dsloc.parser import parse_expression, render


@pytest.fixture
def P():
    return Presentation.build(even="t s x", odd="xi eta", laurent="x")


def e(text, P):
    return parse_expression(text, P)


class TestMul:
    def test_transposition_sign(self, P):
        xi, eta = P.vars("xi eta")
        assert xi * eta == e("xi*eta", P)
        assert eta * xi == -(xi * eta)

    def test_odd_square_vanishes(self, P):
        xi = P.var("xi")
        assert (xi * xi).is_zero()

    def test_difference_of_squares(self, P):
        # (x + xi eta)(x - xi eta) = x^2 since (xi eta)^2 = 0
        assert e("(x + xi*eta)*(x - xi*eta)", P) == e("x^2", P)

    def test_presentation_mismatch(self, P):
        other = Presentation.build(even="t")
        with pytest.raises(PresentationError):
            P.var("t") * other.var("t")


class TestAddScale:
    def test_cancel(self, P):
        xi = P.var("xi")
        assert (xi + xi.scale(-1)).is_zero()

    def test_double(self, P):
        assert P.var("x") + P.var("x") == e("2*x", P)

    def test_normalized_sum(self, P):
        assert (e("xi*eta", P) + e("eta*xi", P)).is_zero()

    def test_zero_coefficients_pruned(self, P):
        f = SuperPoly(P, {P.monomial({"t": 1}): Fraction(0)})
        assert len(f) == 0


def test_parity_of(P):
    assert parity_of(e("x^2*xi*eta", P)) == "even"
    assert parity_of(e("xi + eta", P)) == "odd"
    assert parity_of(e("x + xi", P)) == "inhomogeneous"


class TestSubstituteZero:
    def test_drop_t(self, P):
        assert substitute_zero(e("t + t*xi + eta", P), ["t"]) == e("eta", P)

    def test_empty_set_is_identity(self, P):
        f = e("x*xi", P)
        assert substitute_zero(f, []) == f

    def test_two_vars(self, P):
        assert substitute_zero(e("1 + t*eta", P), ["t", "eta"]) == P.const(1)

    def test_laurent_rejected(self, P):
        with pytest.raises(PresentationError):
            substitute_zero(P.var("x"), ["x"])


class TestEliminate:
    def test_appendix_relation(self):
        A = Presentation.build(even="x1 x2 x3", odd="xi", laurent="x1 x2 x3")
        R, phi = eliminate_unit_monomial(A, e("1 - x1*x2*x3", A), "x3")
        assert R.names == ("x1", "x2", "xi")
        assert phi(A.var("x3")) == e("x1^-1*x2^-1", R)
        assert phi(e("x3*xi", A)) == e("x1^-1*x2^-1*xi", R)
        assert R.eliminated == (("x3", "x1^-1*x2^-1"),)

    def test_single_variable(self):
        A = Presentation.build(even="x", laurent="x")
        R, phi = eliminate_unit_monomial(A, e("1 - x", A), "x")
        assert phi(A.var("x")) == R.const(1)

    def test_exponent_two_rejected(self):
        A = Presentation.build(even="x y", laurent="x y")
        with pytest.raises(PresentationError):
            eliminate_unit_monomial(A, e("1 - x^2*y", A), "x")

    def test_non_laurent_rejected(self):
        A = Presentation.build(even="x y", laurent="y")
        with pytest.raises(PresentationError):
            eliminate_unit_monomial(A, e("1 - x*y", A), "x")

    def test_relation_map_kills_relation(self):
        A = Presentation.build(even="x1 x2 x3", laurent="x1 x2 x3")
        rel = e("1 - x1*x2*x3", A)
        R, phi = eliminate_unit_monomial(A, rel, "x3")
        assert phi(rel).is_zero()


class TestInverse:
    def test_unit_plus_nilpotent(self, P):
        assert e("1 + x*xi*eta", P).inverse() == e("1 - x*xi*eta", P)

    def test_laurent_monomial(self, P):
        assert e("2*x^-3", P).inverse() == e("1/2*x^3", P)

    def test_non_unit(self, P):
        with pytest.raises(NotInvertibleError):
            e("1 + t", P).inverse()

    def test_negative_power(self, P):
        assert e("x", P) ** -2 == e("x^-2", P)


def test_transfer_reorders_odd(P):
    Q = Presentation.build(even="t s x", odd="eta xi", laurent="x")
    f = e("xi*eta", P)
    g = transfer(f, Q)
    assert g == parse_expression("-eta*xi", Q) or render(g) == "-eta*xi"
    assert transfer(g, P) == f
