# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sierpinski.mapexpr import (
    parse_expr, to_text, eval_expr, evaluate_array, UNARY_FUNCTIONS,
)

numbers = st.floats(min_value=0, max_value=1e300, allow_nan=False, allow_infinity=False)
small_numbers = st.floats(min_value=0, max_value=100, allow_nan=False, allow_infinity=False)
variables = st.sampled_from(["x", "y", "t", "pi"])


def expressions(atoms, ops, functions=()):
    def extend(children):
        compound = st.tuples(children, st.sampled_from(ops), children).map(
            lambda t: "({} {} {})".format(*t))
        negated = children.map(lambda e: "(-{})".format(e))
        if functions:
            called = st.tuples(st.sampled_from(functions), children).map(
                lambda t: "{}({})".format(*t))
            return compound | negated | called
        return compound | negated

    return st.recursive(atoms, extend, max_leaves=12)


any_expression = expressions(
    numbers.map(repr) | variables,
    ["+", "-", "*", "/", "^"],
    sorted(UNARY_FUNCTIONS),
)
polynomial = expressions(
    small_numbers.map(repr) | st.sampled_from(["x", "y"]),
    ["+", "-", "*"],
)


@settings(max_examples=200, deadline=None)
@given(text=any_expression)
def test_printed_text_parses_to_the_same_tree(text):
    tree = parse_expr(text)
    printed = to_text(tree)
    assert parse_expr(printed) == tree
    assert to_text(parse_expr(printed)) == printed


@settings(max_examples=100, deadline=None)
@given(
    text=polynomial,
    x=st.floats(min_value=-2, max_value=2),
    y=st.floats(min_value=-2, max_value=2),
)
def test_array_evaluation_agrees_with_scalar(text, x, y):
    tree = parse_expr(text, {"x", "y"})
    scalar = eval_expr(tree, dict(x=x, y=y))
    array = evaluate_array(tree, dict(x=np.array([x, 0.0]), y=np.array([y, 0.0])))
    assert array.shape == (2,)
    assert math.isclose(array[0], scalar, rel_tol=1e-12, abs_tol=1e-12)


if __name__ == "__main__":
    import os

    basename = os.path.basename(__file__)
    pytest.main([basename, "-s", "--tb=native"])
