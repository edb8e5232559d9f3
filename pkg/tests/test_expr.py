import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpt.errors import ExpressionSyntaxError, UnknownIdentifier
from fpt.expr import BinOp, Call, Neg, Num, Var, parse_expression, pretty


@pytest.mark.parametrize("src,x,want", [
    ("-x + 0.5*sin(x)", 0.0, 0.0),
    ("2*x^2", 3.0, 18.0),
    ("exp(-x^2)", 0.0, 1.0),
    ("-x^2", 3.0, -9.0),
    ("2^3^2", 0.0, 512.0),
    ("1e-1*x - 4/2", 10.0, -1.0),
    ("abs(atan(x))", -1.0, math.pi / 4),
    ("tanh(x)*cos(0)", 0.5, math.tanh(0.5)),
])
def test_values(src, x, want):
    assert parse_expression(src)(x) == pytest.approx(want, rel=1e-15)


def test_vectorized():
    f = parse_expression("x^2 + 1")
    np.testing.assert_allclose(f(np.array([0.0, 1.0, 2.0])), [1.0, 2.0, 5.0])
    assert parse_expression("3")(np.zeros(4)).shape == (4,)


@pytest.mark.parametrize("src,offset", [("2 * ", 4), ("(x + 1", 6), ("x $ 2", 2), ("sin x", 4), ("x x", 2)])
def test_syntax_error_offsets(src, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(src)
    assert info.value.offset == offset


def test_offsets_count_bytes():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("x + é")
    assert info.value.offset == 4
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("é")
    assert info.value.offset == 0


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier):
        parse_expression("log(x)")
    with pytest.raises(UnknownIdentifier):
        parse_expression("y + 1")


numbers = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).map(abs).map(Num)
leaves = st.one_of(numbers, st.just(Var()))
trees = st.recursive(
    leaves,
    lambda kids: st.one_of(
        kids.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), kids, kids).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(["sin", "cos", "exp", "tanh", "atan", "abs"]), kids).map(lambda t: Call(*t)),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_pretty_round_trip(tree):
    assert parse_expression(pretty(tree)).tree == tree
