import pytest

from dsloc.algebra import Presentation
from dsloc.errors import ParseError
from dsloc.parser import parse_expression, render


@pytest.fixture
def A():
    return Presentation.build(even="x1 x2 x3 t", odd="xi eta", laurent="x1 x2 x3")


def test_direct_reading(A):
    f = parse_expression("x1^-1 * xi - 2/3", A)
    assert render(f) == "-2/3 + x1^-1*xi"


def test_odd_order_sign(A):
    assert render(parse_expression("eta*xi", A)) == "-xi*eta"


def test_appendix_coefficient(A):
    f = parse_expression("(1 - x1*x2*x3)", A)
    assert render(f) == "1 - x1*x2*x3"


@pytest.mark.parametrize("text,pos", [
    ("x1 + y", 5),
    ("t^-1", 0),
    ("x1 + ", 5),
    ("(x1", 3),
    ("x1 $ 2", 3),
    ("1/0", 2),
])
def test_errors_carry_position(A, text, pos):
    with pytest.raises(ParseError) as info:
        parse_expression(text, A)
    assert info.value.position == pos


def test_unknown_identifier_named(A):
    with pytest.raises(ParseError, match="'y'"):
        parse_expression("y", A)


def test_negative_power_of_non_unit(A):
    with pytest.raises(ParseError):
        parse_expression("(1 + t)^-1", A)


def test_negative_power_of_unit_expression(A):
    assert parse_expression("(2*x1)^-1", A) == parse_expression("1/2*x1^-1", A)


def test_leading_minus_and_zero(A):
    assert render(parse_expression("-x1 + x1", A)) == "0"
    assert parse_expression("-(xi)", A) == -A.var("xi")
