# -*- coding: utf-8 -*-

"""
A small expression language for plane maps, inverse components, gasket
profile functions and ODE right hand sides.

Grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"

``^`` is right associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)``. Identifiers are ``[a-z][a-z0-9_]*``; whitespace is ignored.
Input is ASCII only, so character offsets are byte offsets.

Usage::

    >>> expr = parse_expr("x^2+y^2")
    >>> eval_expr(expr, dict(x=0.8, y=0.6))
    1.0
    >>> m = parse_map("x/2, y/2 | 2*x, 2*y")
"""

import re
import math
import typing

import attr
import numpy as np

VARIABLES = frozenset(["x", "y", "t", "pi"])
"""
every variable the language knows, ``pi`` is a constant.
"""

MAP_VARIABLES = frozenset(["x", "y", "pi"])
FUNC_VARIABLES = frozenset(["x", "pi"])
ODE_VARIABLES = VARIABLES

UNARY_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "asin": np.arcsin,
    "acos": np.arccos,
    "atan": np.arctan,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "exp": np.exp,
    "log": np.log,
    "cbrt": np.cbrt,
}

BINARY_FUNCTIONS = frozenset(["mod"])

FUNCTION_ARITY = dict(
    [(name, 1) for name in UNARY_FUNCTIONS] + [("mod", 2)]
)

Value = typing.Union[float, np.ndarray]


class ParseError(ValueError):
    """
    Syntax error, unknown identifier or arity mismatch at ``offset``.
    """

    def __init__(self, message: str, offset: int):
        super(ParseError, self).__init__("{} (at offset {})".format(message, offset))
        self.message = message
        self.offset = offset


class EvalError(ValueError):
    """
    Evaluation failure (domain error, unbound variable) at node ``offset``.
    """

    def __init__(self, message: str, offset: int):
        super(EvalError, self).__init__("{} (at offset {})".format(message, offset))
        self.message = message
        self.offset = offset


# --- Tokens ---
_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[a-z][a-z0-9_]*)"
    r"|(?P<op>[-+*/^(),|])"
    r")"
)


@attr.s(frozen=True, slots=True)
class Token(object):
    kind: str = attr.ib()
    text: str = attr.ib()
    offset: int = attr.ib()


def tokenize(text: str) -> typing.List[Token]:
    if not text.isascii():
        raise ParseError("only ASCII characters are supported", 0)
    tokens = list()
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.lastgroup is None:
            offset = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(
                "unexpected character {!r}".format(text[offset]), offset)
        kind = match.lastgroup
        tokens.append(Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# --- Syntax tree ---
@attr.s(frozen=True, slots=True)
class Number(object):
    value: float = attr.ib(converter=float)
    offset: int = attr.ib(default=0, eq=False, repr=False)


@attr.s(frozen=True, slots=True)
class Variable(object):
    name: str = attr.ib()
    offset: int = attr.ib(default=0, eq=False, repr=False)


@attr.s(frozen=True, slots=True)
class Negate(object):
    operand = attr.ib()
    offset: int = attr.ib(default=0, eq=False, repr=False)


@attr.s(frozen=True, slots=True)
class BinaryOp(object):
    op: str = attr.ib()
    left = attr.ib()
    right = attr.ib()
    offset: int = attr.ib(default=0, eq=False, repr=False)


@attr.s(frozen=True, slots=True)
class Call(object):
    name: str = attr.ib()
    args: tuple = attr.ib(converter=tuple)
    offset: int = attr.ib(default=0, eq=False, repr=False)


Expr = typing.Union[Number, Variable, Negate, BinaryOp, Call]


class Parser(object):
    """
    Recursive descent parser, one method per grammar rule.

    :param variables: identifiers accepted as variables.
    """

    def __init__(self, text: str, variables: typing.AbstractSet[str] = VARIABLES):
        self.text = text
        self.variables = variables
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text: str) -> typing.Optional[Token]:
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        return None

    def expect(self, text: str, context: str) -> Token:
        token = self.accept(text)
        if token is None:
            raise ParseError(
                "expected '{}' {}, found {}".format(text, context, self.describe()),
                self.current.offset,
            )
        return token

    def describe(self) -> str:
        if self.current.kind == "end":
            return "end of input"
        return "'{}'".format(self.current.text)

    def expect_end(self):
        if self.current.kind != "end":
            raise ParseError(
                "expected end of input, found {}".format(self.describe()),
                self.current.offset,
            )

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.current.kind == "op" and self.current.text in "+-":
            token = self.advance()
            node = BinaryOp(token.text, node, self.parse_term(), token.offset)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.current.kind == "op" and self.current.text in "*/":
            token = self.advance()
            node = BinaryOp(token.text, node, self.parse_factor(), token.offset)
        return node

    def parse_factor(self) -> Expr:
        token = self.accept("-")
        if token is not None:
            return Negate(self.parse_factor(), token.offset)
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        token = self.accept("^")
        if token is not None:
            return BinaryOp("^", base, self.parse_factor(), token.offset)
        return base

    def parse_atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Number(float(token.text), token.offset)
        if token.kind == "ident":
            self.advance()
            if self.accept("(") is not None:
                return self.parse_call(token)
            if token.text in self.variables:
                return Variable(token.text, token.offset)
            raise ParseError(
                "unknown identifier '{}'".format(token.text), token.offset)
        if self.accept("(") is not None:
            node = self.parse_expr()
            self.expect(")", "to close '('")
            return node
        raise ParseError(
            "expected a number, identifier or '(', found {}".format(self.describe()),
            token.offset,
        )

    def parse_call(self, name: Token) -> Call:
        if name.text not in FUNCTION_ARITY:
            raise ParseError("unknown function '{}'".format(name.text), name.offset)
        args = [self.parse_expr()]
        while self.accept(",") is not None:
            args.append(self.parse_expr())
        self.expect(")", "to close the call of '{}'".format(name.text))
        arity = FUNCTION_ARITY[name.text]
        if len(args) != arity:
            raise ParseError(
                "function '{}' takes {} argument(s), got {}".format(
                    name.text, arity, len(args)),
                name.offset,
            )
        return Call(name.text, args, name.offset)

    def parse_list(self) -> typing.List[typing.Tuple[int, Expr]]:
        items = [(self.current.offset, self.parse_expr())]
        while self.accept(",") is not None:
            offset = self.current.offset
            items.append((offset, self.parse_expr()))
        return items


def parse_expr(text: str, variables: typing.AbstractSet[str] = VARIABLES) -> Expr:
    parser = Parser(text, variables)
    node = parser.parse_expr()
    parser.expect_end()
    return node


# --- Printing ---
def to_text(expr: Expr) -> str:
    """
    Canonical fully parenthesized form, parses back to an equal tree.
    """
    if isinstance(expr, Number):
        return repr(expr.value)
    if isinstance(expr, Variable):
        return expr.name
    if isinstance(expr, Negate):
        return "(-{})".format(to_text(expr.operand))
    if isinstance(expr, BinaryOp):
        return "({} {} {})".format(to_text(expr.left), expr.op, to_text(expr.right))
    if isinstance(expr, Call):
        return "{}({})".format(expr.name, ", ".join(to_text(a) for a in expr.args))
    raise TypeError("not an expression node: {!r}".format(expr))


def variables_of(expr: Expr) -> typing.Set[str]:
    if isinstance(expr, Variable):
        return {expr.name}
    if isinstance(expr, Negate):
        return variables_of(expr.operand)
    if isinstance(expr, BinaryOp):
        return variables_of(expr.left) | variables_of(expr.right)
    if isinstance(expr, Call):
        result = set()
        for arg in expr.args:
            result |= variables_of(arg)
        return result
    return set()


# --- Evaluation ---
def _domain_check(bad, strict: bool, result, message: str, offset: int):
    if np.any(bad):
        if strict:
            raise EvalError(message, offset)
        result = np.where(bad, np.nan, result)
    return result


def _evaluate(expr: Expr, env: typing.Mapping[str, Value], strict: bool) -> Value:
    if isinstance(expr, Number):
        return np.float64(expr.value)

    if isinstance(expr, Variable):
        if expr.name == "pi":
            return np.float64(math.pi)
        try:
            return env[expr.name]
        except KeyError:
            raise EvalError("unbound variable '{}'".format(expr.name), expr.offset)

    if isinstance(expr, Negate):
        return -_evaluate(expr.operand, env, strict)

    if isinstance(expr, BinaryOp):
        left = _evaluate(expr.left, env, strict)
        right = _evaluate(expr.right, env, strict)
        op = expr.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            result = left / right
            return _domain_check(
                right == 0, strict, result, "division by zero", expr.offset)
        if op == "^":
            result = np.power(left, right)
            bad = ((left < 0) & (right != np.floor(right))) | ((left == 0) & (right < 0))
            return _domain_check(
                bad, strict, result,
                "power of a negative or zero base with this exponent", expr.offset)
        raise EvalError("unknown operator '{}'".format(op), expr.offset)  # pragma: no cover

    if isinstance(expr, Call):
        args = [_evaluate(arg, env, strict) for arg in expr.args]
        name = expr.name
        if name == "mod":
            a, b = args
            result = a - b * np.floor(a / b)
            return _domain_check(b == 0, strict, result, "mod by zero", expr.offset)
        value = args[0]
        result = UNARY_FUNCTIONS[name](value)
        if name in ("asin", "acos"):
            return _domain_check(
                np.abs(value) > 1, strict, result,
                "{} of a value outside [-1, 1]".format(name), expr.offset)
        if name == "sqrt":
            return _domain_check(
                value < 0, strict, result, "sqrt of a negative value", expr.offset)
        if name == "log":
            return _domain_check(
                value <= 0, strict, result, "log of a non-positive value", expr.offset)
        return result

    raise TypeError("not an expression node: {!r}".format(expr))


def eval_expr(expr: Expr, env: typing.Mapping[str, float]) -> float:
    """
    Evaluate ``expr`` to a 64 bit float, raising :class:`EvalError` on
    domain errors.
    """
    with np.errstate(all="ignore"):
        return float(_evaluate(expr, env, strict=True))


def evaluate_array(
    expr: Expr,
    env: typing.Mapping[str, np.ndarray],
    strict: bool = False,
) -> np.ndarray:
    """
    Evaluate over numpy arrays. Unless ``strict``, points in a domain error
    evaluate to NaN instead of raising.
    """
    with np.errstate(all="ignore"):
        result = _evaluate(expr, env, strict=strict)
    shapes = [np.shape(v) for v in env.values()]
    shape = np.broadcast_shapes(*shapes) if shapes else ()
    return np.broadcast_to(np.asarray(result, dtype=np.float64), shape).copy()


# --- Definitions ---
@attr.s(frozen=True)
class MapDef(object):
    """
    Plane map given by expression components, ``inverse`` components use
    ``x, y`` for the image coordinates.
    """
    forward: typing.Tuple[Expr, Expr] = attr.ib(converter=tuple)
    inverse: typing.Optional[typing.Tuple[Expr, Expr]] = attr.ib(default=None)
    name: str = attr.ib(default="expr")
    text: str = attr.ib(default="", eq=False)

    @property
    def invertible(self) -> bool:
        return self.inverse is not None


@attr.s(frozen=True)
class FuncDef(object):
    """
    One variable real function, the body uses ``x``.
    """
    body: Expr = attr.ib()
    text: str = attr.ib(default="", eq=False)

    def __call__(self, xs: Value) -> Value:
        return evaluate_array(self.body, dict(x=np.asarray(xs, dtype=np.float64)), strict=True)


def parse_map(text: str, name: str = "expr") -> MapDef:
    """
    Parse ``"e1, e2"`` or ``"e1, e2 | e3, e4"``.
    """
    parser = Parser(text, MAP_VARIABLES)
    forward = _two_components(parser.parse_list(), "forward")
    inverse = None
    if parser.accept("|") is not None:
        inverse = _two_components(parser.parse_list(), "inverse")
    parser.expect_end()
    return MapDef(forward=forward, inverse=inverse, name=name, text=text)


def _two_components(items, part: str) -> typing.Tuple[Expr, Expr]:
    if len(items) != 2:
        offset = items[2][0] if len(items) > 2 else items[-1][0]
        raise ParseError(
            "wrong component count: the {} map needs 2 components, got {}".format(
                part, len(items)),
            offset,
        )
    return (items[0][1], items[1][1])


def parse_func(text: str) -> FuncDef:
    return FuncDef(body=parse_expr(text, FUNC_VARIABLES), text=text)
