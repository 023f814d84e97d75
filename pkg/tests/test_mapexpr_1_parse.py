# -*- coding: utf-8 -*-

import pytest

from sierpinski.mapexpr import (
    ParseError, Number, Variable, BinaryOp, Negate,
    tokenize, parse_expr, parse_map, parse_func, to_text, variables_of,
    MAP_VARIABLES,
)

GOLDEN = [
    ("x", "x"),
    ("2", "2.0"),
    ("x+y", "(x + y)"),
    ("x-y-1", "((x - y) - 1.0)"),
    ("x*y/2", "((x * y) / 2.0)"),
    ("x/y/2", "((x / y) / 2.0)"),
    ("x+y*2", "(x + (y * 2.0))"),
    ("(x+y)*2", "((x + y) * 2.0)"),
    ("-x^2", "(-(x ^ 2.0))"),
    ("x^y^2", "(x ^ (y ^ 2.0))"),
    ("2^-x", "(2.0 ^ (-x))"),
    ("--x", "(-(-x))"),
    ("-x*y", "((-x) * y)"),
    ("2*-x", "(2.0 * (-x))"),
    ("-(x+y)", "(-(x + y))"),
    ("sin(x)", "sin(x)"),
    ("cos(x)^2", "(cos(x) ^ 2.0)"),
    ("mod(x, 3)", "mod(x, 3.0)"),
    ("sqrt(2*x-y^2)", "sqrt(((2.0 * x) - (y ^ 2.0)))"),
    ("abs(x-1)/3", "(abs((x - 1.0)) / 3.0)"),
    ("exp(log(x))", "exp(log(x))"),
    ("cbrt(y^2)", "cbrt((y ^ 2.0))"),
    ("atan(x)+acos(y)", "(atan(x) + acos(y))"),
    ("1e3", "1000.0"),
    (".5*x", "(0.5 * x)"),
    ("1.5e-2*y", "(0.015 * y)"),
    ("pi/2", "(pi / 2.0)"),
    ("  x  +  y ", "(x + y)"),
    ("t*x", "(t * x)"),
    ("x^2+y^2", "((x ^ 2.0) + (y ^ 2.0))"),
]

ERRORS = [
    ("", 0),
    ("x+", 2),
    ("(x+y", 4),
    ("x+$", 2),
    ("foo(x)", 0),
    ("z+1", 0),
    ("x + q", 4),
    ("sin(x, y)", 0),
    ("mod(x)", 0),
    ("x y", 2),
    ("1.2.3", 3),
    ("Sin(x)", 0),
    ("x ^", 3),
    (" )", 1),
    ("2*(x", 4),
]


@pytest.mark.parametrize("text,expected", GOLDEN)
def test_golden(text, expected):
    expr = parse_expr(text)
    assert to_text(expr) == expected
    # the printed form parses back to the same tree
    assert parse_expr(to_text(expr)) == expr


@pytest.mark.parametrize("text,offset", ERRORS)
def test_error_offset(text, offset):
    with pytest.raises(ParseError) as e:
        parse_expr(text)
    assert e.value.offset == offset
    assert "offset {}".format(offset) in str(e.value)


def test_non_ascii():
    with pytest.raises(ParseError):
        parse_expr("x+é")


def test_tokenize():
    tokens = tokenize("sin(x) ^ 2")
    assert [t.kind for t in tokens] == ["ident", "op", "ident", "op", "op", "number", "end"]
    assert [t.offset for t in tokens] == [0, 3, 4, 5, 7, 9, 10]


def test_tree():
    expr = parse_expr("x - 2")
    assert expr == BinaryOp("-", Variable("x"), Number(2.0))
    assert expr.offset == 2
    assert parse_expr("-y") == Negate(Variable("y"))


def test_variables():
    assert variables_of(parse_expr("sin(t*x) + y - pi")) == {"t", "x", "y", "pi"}
    with pytest.raises(ParseError):
        parse_expr("t + x", MAP_VARIABLES)


class TestParseMap(object):
    def test_forward_and_inverse(self):
        m = parse_map("x/2, y/2 | 2*x, 2*y")
        assert m.invertible
        assert to_text(m.forward[0]) == "(x / 2.0)"
        assert to_text(m.inverse[1]) == "(2.0 * y)"

    def test_forward_only(self):
        m = parse_map("x^2-y, x+y^2", name="quadratic")
        assert not m.invertible
        assert m.name == "quadratic"

    @pytest.mark.parametrize("text,offset", [
        ("x, y, x", 6),
        ("x", 0),
        ("x, y | x", 7),
        ("x, t", 3),
        ("x, y |", 6),
        ("x, y | x, y | x, y", 12),
    ])
    def test_errors(self, text, offset):
        with pytest.raises(ParseError) as e:
            parse_map(text)
        assert e.value.offset == offset

    def test_component_count_message(self):
        with pytest.raises(ParseError) as e:
            parse_map("x, y, x")
        assert "wrong component count" in str(e.value)


def test_parse_func():
    f = parse_func("sin(x)^2")
    assert f.text == "sin(x)^2"
    with pytest.raises(ParseError):
        parse_func("y")


if __name__ == "__main__":
    import os

    basename = os.path.basename(__file__)
    pytest.main([basename, "-s", "--tb=native"])
