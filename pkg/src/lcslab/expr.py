"""Closed-form scalar expressions over an ambient R^N.

This is deliberately not a CAS.  Expressions are immutable trees built from
coordinates ``x1..xN``, the family parameters ``t`` and ``s``, arithmetic,
rational powers and a fixed function set.  Differentiation is exact and
simplification is limited to constant folding and 0/1 absorption, so a
derivative is always a finite formula, never a numerical estimate.  The
finite-difference oracle lives next to the exact rules precisely so the two
can be played against each other in tests.

Grammar (leading '-' and signed exponents included):

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ('^' exponent)?
    base     := number | 'x'INT | 't' | 's' | func '(' expr (',' expr)? ')' | '(' expr ')'
    exponent := ['-']INT['/'INT] | '(' ['-']INT['/'INT] ')'
    func     := 'sin' | 'cos' | 'exp' | 'ln' | 'sqrt' | 'atan2'
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

from .errors import (
    CoordinateRangeError,
    DimensionMismatchError,
    EvaluationDomainError,
    ExprSyntaxError,
)

_FUNCTIONS = {"sin": 1, "cos": 1, "exp": 1, "ln": 1, "sqrt": 1, "atan2": 2}

_NUMPY_NAME = {"sin": "np.sin", "cos": "np.cos", "exp": "np.exp",
               "ln": "np.log", "sqrt": "np.sqrt", "atan2": "np.arctan2"}


class Expression:
    """Immutable expression tree node.  Use the module helpers to build them."""

    __slots__ = ("_hash",)

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            object.__setattr__(self, "_hash", hash((type(self).__name__, self._key())))
            return self._hash

    def __repr__(self):
        return f"Expression({to_source(self)!r})"

    # Operator sugar so geometric code can combine expressions directly.
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, q):
        return power(self, q)


class Const(Expression):
    __slots__ = ("value",)

    def __init__(self, value: float):
        object.__setattr__(self, "value", float(value))

    def __setattr__(self, *a):  # keep nodes immutable
        raise AttributeError("Expression nodes are immutable")

    def _key(self):
        return (self.value,)


class Coord(Expression):
    """Zero-based coordinate index; prints as x{index+1}."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        object.__setattr__(self, "index", int(index))

    def __setattr__(self, *a):
        raise AttributeError("Expression nodes are immutable")

    def _key(self):
        return (self.index,)


class Param(Expression):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if name not in ("t", "s"):
            raise ValueError("parameter must be 't' or 's'")
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("Expression nodes are immutable")

    def _key(self):
        return (self.name,)


class BinOp(Expression):
    __slots__ = ("op", "a", "b")

    def __init__(self, op: str, a: Expression, b: Expression):
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, *a):
        raise AttributeError("Expression nodes are immutable")

    def _key(self):
        return (self.op, self.a, self.b)


class Neg(Expression):
    __slots__ = ("a",)

    def __init__(self, a: Expression):
        object.__setattr__(self, "a", a)

    def __setattr__(self, *a):
        raise AttributeError("Expression nodes are immutable")

    def _key(self):
        return (self.a,)


class Pow(Expression):
    """base ^ exponent with a rational literal exponent."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Expression, exponent: Fraction):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", Fraction(exponent))

    def __setattr__(self, *a):
        raise AttributeError("Expression nodes are immutable")

    def _key(self):
        return (self.base, self.exponent)


class Call(Expression):
    __slots__ = ("fn", "args")

    def __init__(self, fn: str, args: tuple):
        object.__setattr__(self, "fn", fn)
        object.__setattr__(self, "args", tuple(args))

    def __setattr__(self, *a):
        raise AttributeError("Expression nodes are immutable")

    def _key(self):
        return (self.fn, self.args)


ZERO = Const(0.0)
ONE = Const(1.0)


def _coerce(v) -> Expression:
    if isinstance(v, Expression):
        return v
    if isinstance(v, (int, float)):
        return Const(v)
    raise TypeError(f"cannot use {type(v).__name__} in an expression")


def is_zero(e: Expression) -> bool:
    return isinstance(e, Const) and e.value == 0.0


def is_const(e: Expression, v: float) -> bool:
    return isinstance(e, Const) and e.value == v


# ---------------------------------------------------------------------------
# Smart constructors: constant folding plus 0/1 absorption, nothing deeper.

def add(a: Expression, b: Expression) -> Expression:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if is_zero(a):
        return b
    if is_zero(b):
        return a
    return BinOp("+", a, b)


def sub(a: Expression, b: Expression) -> Expression:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if is_zero(b):
        return a
    if is_zero(a):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expression, b: Expression) -> Expression:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if is_zero(a) or is_zero(b):
        return ZERO
    if is_const(a, 1.0):
        return b
    if is_const(b, 1.0):
        return a
    if is_const(a, -1.0):
        return neg(b)
    if is_const(b, -1.0):
        return neg(a)
    return BinOp("*", a, b)


def div(a: Expression, b: Expression) -> Expression:
    if isinstance(b, Const):
        if b.value == 0.0:
            raise EvaluationDomainError("division by constant zero")
        if isinstance(a, Const):
            return Const(a.value / b.value)
        if b.value == 1.0:
            return a
    if is_zero(a):
        return ZERO
    return BinOp("/", a, b)


def neg(a: Expression) -> Expression:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def power(base: Expression, q) -> Expression:
    q = Fraction(q)
    if q == 0:
        return ONE
    if q == 1:
        return base
    if isinstance(base, Const):
        try:
            return Const(float(base.value) ** float(q))
        except (OverflowError, ValueError):
            pass
    return Pow(base, q)


def call(fn: str, *args: Expression) -> Expression:
    if fn not in _FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}")
    if len(args) != _FUNCTIONS[fn]:
        raise ValueError(f"{fn} takes {_FUNCTIONS[fn]} argument(s)")
    return Call(fn, args)


# ---------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind, text, offset):
        self.kind = kind
        self.text = text
        self.offset = offset


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(source) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {source[bad_at]!r}", bad_at)
        if m.lastgroup == "num":
            tokens.append(_Token("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(_Token("name", m.group("name"), m.start("name")))
        else:
            tokens.append(_Token("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, ambient_dim: int):
        self.source = source
        self.dim = ambient_dim
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ExprSyntaxError(f"expected {text!r}", tok.offset)
        return self.advance()

    def parse(self) -> Expression:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {tok.text!r}", tok.offset)
        return e

    def expr(self) -> Expression:
        negate = False
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            negate = True
        e = self.term()
        if negate:
            e = neg(e)
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                rhs = self.term()
                e = add(e, rhs) if tok.text == "+" else sub(e, rhs)
            else:
                return e

    def term(self) -> Expression:
        e = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                rhs = self.factor()
                e = mul(e, rhs) if tok.text == "*" else div(e, rhs)
            else:
                return e

    def factor(self) -> Expression:
        e = self.base()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            e = power(e, self.exponent())
        return e

    def exponent(self) -> Fraction:
        tok = self.peek()
        parens = tok.kind == "op" and tok.text == "("
        if parens:
            self.advance()
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            sign = -1
        tok = self.peek()
        if tok.kind != "num" or "." in tok.text or "e" in tok.text or "E" in tok.text:
            raise ExprSyntaxError("exponent must be an integer or rational literal", tok.offset)
        self.advance()
        numerator = int(tok.text)
        denominator = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text == "/":
            self.advance()
            tok = self.peek()
            if tok.kind != "num" or "." in tok.text or "e" in tok.text or "E" in tok.text:
                raise ExprSyntaxError("exponent denominator must be an integer", tok.offset)
            self.advance()
            denominator = int(tok.text)
            if denominator == 0:
                raise ExprSyntaxError("exponent denominator is zero", tok.offset)
        if parens:
            self.expect_op(")")
        return Fraction(sign * numerator, denominator)

    def base(self) -> Expression:
        tok = self.advance()
        if tok.kind == "num":
            return Const(float(tok.text))
        if tok.kind == "name":
            name = tok.text
            if name in ("t", "s"):
                return Param(name)
            if name in _FUNCTIONS:
                self.expect_op("(")
                args = [self.expr()]
                if _FUNCTIONS[name] == 2:
                    self.expect_op(",")
                    args.append(self.expr())
                self.expect_op(")")
                return Call(name, tuple(args))
            m = re.fullmatch(r"x(\d+)", name)
            if m:
                index = int(m.group(1))
                if not 1 <= index <= self.dim:
                    raise CoordinateRangeError(
                        f"coordinate {name} outside ambient dimension {self.dim}", tok.offset)
                return Coord(index - 1)
            raise ExprSyntaxError(f"unknown symbol {name!r}", tok.offset)
        if tok.kind == "op" and tok.text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(f"unexpected {tok.text!r}" if tok.text else "unexpected end of input",
                              tok.offset)


def parse(source: str, ambient_dim: int) -> Expression:
    """Parse ``source`` over coordinates x1..x{ambient_dim}."""
    return _Parser(source, ambient_dim).parse()


# ---------------------------------------------------------------------------
# Printing.  to_source(parse(s)) reparses to a structurally equal tree.

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_POW = 3
_PREC_ATOM = 4


def _prec(e: Expression) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_ADD
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _fmt_const(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _emit(e: Expression, min_prec: int) -> str:
    if isinstance(e, Const):
        text = _fmt_const(e.value)
        if e.value < 0 and min_prec > _PREC_ADD:
            return f"({text})"
        return text
    if isinstance(e, Coord):
        return f"x{e.index + 1}"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Call):
        inner = ", ".join(_emit(a, _PREC_ADD) for a in e.args)
        return f"{e.fn}({inner})"
    if isinstance(e, Neg):
        text = "-" + _emit(e.a, _PREC_MUL)
        return f"({text})" if min_prec > _PREC_ADD else text
    if isinstance(e, Pow):
        q = e.exponent
        if q.denominator == 1 and q.numerator >= 0:
            exp_text = str(q.numerator)
        elif q.denominator == 1:
            exp_text = f"(-{-q.numerator})"
        else:
            sign = "-" if q < 0 else ""
            exp_text = f"({sign}{abs(q.numerator)}/{q.denominator})"
        text = f"{_emit(e.base, _PREC_ATOM)}^{exp_text}"
        return f"({text})" if min_prec > _PREC_POW else text
    if isinstance(e, BinOp):
        own = _prec(e)
        left = _emit(e.a, own)
        right = _emit(e.b, own + 1)
        text = f"{left} {e.op} {right}"
        return f"({text})" if min_prec > own else text
    raise TypeError(f"not an expression node: {e!r}")


def to_source(e: Expression) -> str:
    return _emit(e, _PREC_ADD)


# ---------------------------------------------------------------------------
# Exact differentiation

def partial(e: Expression, index: int) -> Expression:
    """Exact partial derivative with respect to coordinate ``index`` (0-based)."""
    return _derive(e, lambda node: ONE if isinstance(node, Coord) and node.index == index else ZERO)


def param_partial(e: Expression, name: str) -> Expression:
    """Exact derivative with respect to the family parameter 't' or 's'."""
    return _derive(e, lambda node: ONE if isinstance(node, Param) and node.name == name else ZERO)


def _derive(e: Expression, leaf_rule) -> Expression:
    if isinstance(e, (Const, Coord, Param)):
        return leaf_rule(e)
    if isinstance(e, Neg):
        return neg(_derive(e.a, leaf_rule))
    if isinstance(e, BinOp):
        da = _derive(e.a, leaf_rule)
        db = _derive(e.b, leaf_rule)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, e.b), mul(e.a, db))
        # quotient rule
        return div(sub(mul(da, e.b), mul(e.a, db)), power(e.b, 2))
    if isinstance(e, Pow):
        dbase = _derive(e.base, leaf_rule)
        return mul(mul(Const(float(e.exponent)), power(e.base, e.exponent - 1)), dbase)
    if isinstance(e, Call):
        if e.fn == "atan2":
            y, x = e.args
            dy = _derive(y, leaf_rule)
            dx = _derive(x, leaf_rule)
            num = sub(mul(x, dy), mul(y, dx))
            return div(num, add(mul(x, x), mul(y, y)))
        (a,) = e.args
        da = _derive(a, leaf_rule)
        if e.fn == "sin":
            outer = call("cos", a)
        elif e.fn == "cos":
            outer = neg(call("sin", a))
        elif e.fn == "exp":
            outer = e
        elif e.fn == "ln":
            return div(da, a)
        elif e.fn == "sqrt":
            return div(da, mul(Const(2.0), e))
        else:  # pragma: no cover - function table is closed
            raise ValueError(e.fn)
        return mul(outer, da)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Substitution (used for map composition and for fixing family parameters)

def substitute(e: Expression, coord_map=None, param_map=None) -> Expression:
    """Replace Coord / Param leaves by expressions.

    coord_map: dict index -> Expression; unmapped coordinates stay themselves.
    param_map: dict name -> Expression.
    """
    coord_map = coord_map or {}
    param_map = param_map or {}

    def rec(node):
        if isinstance(node, Const):
            return node
        if isinstance(node, Coord):
            return coord_map.get(node.index, node)
        if isinstance(node, Param):
            return param_map.get(node.name, node)
        if isinstance(node, Neg):
            return neg(rec(node.a))
        if isinstance(node, BinOp):
            a, b = rec(node.a), rec(node.b)
            return {"+": add, "-": sub, "*": mul, "/": div}[node.op](a, b)
        if isinstance(node, Pow):
            return power(rec(node.base), node.exponent)
        if isinstance(node, Call):
            return Call(node.fn, tuple(rec(a) for a in node.args))
        raise TypeError(f"not an expression node: {node!r}")

    return rec(e)


def shift_coords(e: Expression, offset: int) -> Expression:
    """Reindex every coordinate by +offset (used when embedding into a product)."""

    def rec(node):
        if isinstance(node, Coord):
            return Coord(node.index + offset)
        if isinstance(node, (Const, Param)):
            return node
        if isinstance(node, Neg):
            return Neg(rec(node.a))
        if isinstance(node, BinOp):
            return BinOp(node.op, rec(node.a), rec(node.b))
        if isinstance(node, Pow):
            return Pow(rec(node.base), node.exponent)
        if isinstance(node, Call):
            return Call(node.fn, tuple(rec(a) for a in node.args))
        raise TypeError(f"not an expression node: {node!r}")

    return rec(e)


def uses_param(e: Expression, name: str) -> bool:
    if isinstance(e, Param):
        return e.name == name
    if isinstance(e, Neg):
        return uses_param(e.a, name)
    if isinstance(e, BinOp):
        return uses_param(e.a, name) or uses_param(e.b, name)
    if isinstance(e, Pow):
        return uses_param(e.base, name)
    if isinstance(e, Call):
        return any(uses_param(a, name) for a in e.args)
    return False


# ---------------------------------------------------------------------------
# Compiled evaluation

def _source_for_eval(e: Expression) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Coord):
        return f"c[..., {e.index}]"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-({_source_for_eval(e.a)}))"
    if isinstance(e, BinOp):
        return f"({_source_for_eval(e.a)} {e.op} {_source_for_eval(e.b)})"
    if isinstance(e, Pow):
        q = e.exponent
        if q.denominator == 1:
            return f"({_source_for_eval(e.base)})**({q.numerator})"
        return f"np.power({_source_for_eval(e.base)}, {float(q)!r})"
    if isinstance(e, Call):
        args = ", ".join(_source_for_eval(a) for a in e.args)
        return f"{_NUMPY_NAME[e.fn]}({args})"
    raise TypeError(f"not an expression node: {e!r}")


_COMPILED_CACHE: dict = {}


def compiled(e: Expression):
    """A numpy-broadcasting callable (coords, t, s) -> array for the tree."""
    fn = _COMPILED_CACHE.get(e)
    if fn is None:
        src = f"lambda c, t, s: ({_source_for_eval(e)}) + np.zeros(c.shape[:-1])"
        fn = eval(src, {"np": np})  # noqa: S307 - source is generated from the tree
        _COMPILED_CACHE[e] = fn
    return fn


class ScalarField:
    """An expression bound to an ambient dimension; evaluates and differentiates."""

    __slots__ = ("expression", "dim")

    def __init__(self, expression: Expression, dim: int):
        self.expression = expression
        self.dim = int(dim)

    @classmethod
    def from_source(cls, source: str, dim: int) -> "ScalarField":
        return cls(parse(source, dim), dim)

    @classmethod
    def constant(cls, value: float, dim: int) -> "ScalarField":
        return cls(Const(value), dim)

    def __repr__(self):
        return f"ScalarField({to_source(self.expression)!r}, dim={self.dim})"

    def __eq__(self, other):
        return (isinstance(other, ScalarField) and other.dim == self.dim
                and other.expression == self.expression)

    def __hash__(self):
        return hash((self.dim, self.expression))

    def source(self) -> str:
        return to_source(self.expression)

    def evaluate(self, points, t: float = 0.0, s: float = 0.0):
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"points have {pts.shape[-1]} coordinates, field is over R^{self.dim}")
        with np.errstate(all="ignore"):
            out = compiled(self.expression)(pts, float(t), float(s))
        if not np.all(np.isfinite(out)):
            raise EvaluationDomainError(
                f"field {to_source(self.expression)!r} left its domain")
        if out.shape == ():
            return float(out)
        return out

    def partial(self, index: int) -> "ScalarField":
        if not 0 <= index < self.dim:
            raise DimensionMismatchError(f"no coordinate {index} in R^{self.dim}")
        return ScalarField(partial(self.expression, index), self.dim)

    def gradient(self) -> list:
        return [self.partial(i) for i in range(self.dim)]

    def gradient_at(self, point, t: float = 0.0, s: float = 0.0) -> np.ndarray:
        return np.array([g.evaluate(point, t=t, s=s) for g in self.gradient()])

    def param_partial(self, name: str) -> "ScalarField":
        return ScalarField(param_partial(self.expression, name), self.dim)

    def at_param(self, name: str, value: float) -> "ScalarField":
        fixed = substitute(self.expression, param_map={name: Const(value)})
        return ScalarField(fixed, self.dim)

    def compose(self, components: list) -> "ScalarField":
        """Substitute coordinate i by components[i]; result lives over their dim."""
        if len(components) != self.dim:
            raise DimensionMismatchError(
                f"need {self.dim} substitution components, got {len(components)}")
        new_dim = components[0].dim
        for c in components:
            if c.dim != new_dim:
                raise DimensionMismatchError("substitution components disagree on dimension")
        coord_map = {i: components[i].expression for i in range(self.dim)}
        return ScalarField(substitute(self.expression, coord_map=coord_map), new_dim)

    def shift_into(self, dim: int, offset: int) -> "ScalarField":
        """View this field in a larger ambient space with coordinates shifted."""
        return ScalarField(shift_coords(self.expression, offset), dim)

    def __add__(self, other):
        other = as_field(other, self.dim)
        return ScalarField(add(self.expression, other.expression), self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_field(other, self.dim)
        return ScalarField(sub(self.expression, other.expression), self.dim)

    def __rsub__(self, other):
        other = as_field(other, self.dim)
        return ScalarField(sub(other.expression, self.expression), self.dim)

    def __mul__(self, other):
        other = as_field(other, self.dim)
        return ScalarField(mul(self.expression, other.expression), self.dim)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_field(other, self.dim)
        return ScalarField(div(self.expression, other.expression), self.dim)

    def __rtruediv__(self, other):
        other = as_field(other, self.dim)
        return ScalarField(div(other.expression, self.expression), self.dim)

    def __neg__(self):
        return ScalarField(neg(self.expression), self.dim)

    def __pow__(self, q):
        return ScalarField(power(self.expression, q), self.dim)

    def exp(self) -> "ScalarField":
        return ScalarField(call("exp", self.expression), self.dim)

    def is_zero(self) -> bool:
        return is_zero(self.expression)


def as_field(value, dim: int) -> ScalarField:
    if isinstance(value, ScalarField):
        if value.dim != dim:
            raise DimensionMismatchError(
                f"field over R^{value.dim} used where R^{dim} expected")
        return value
    if isinstance(value, Expression):
        return ScalarField(value, dim)
    if isinstance(value, (int, float)):
        return ScalarField.constant(float(value), dim)
    if isinstance(value, str):
        return ScalarField.from_source(value, dim)
    raise TypeError(f"cannot interpret {type(value).__name__} as a scalar field")


def fd_partial(field: ScalarField, point, index: int, t: float = 0.0, s: float = 0.0,
               scale: float = 1e-5) -> float:
    """Central-difference oracle for a single partial derivative.

    Step is scale * (1 + |x_index|); this is the reference every exact rule is
    tested against, so keep it independent of the symbolic machinery.
    """
    p = np.asarray(point, dtype=float)
    h = scale * (1.0 + abs(p[index]))
    hi = p.copy()
    lo = p.copy()
    hi[index] += h
    lo[index] -= h
    return (field.evaluate(hi, t=t, s=s) - field.evaluate(lo, t=t, s=s)) / (2.0 * h)


def fd_param_partial(field: ScalarField, point, name: str, at: float = 0.0,
                     scale: float = 1e-6) -> float:
    """Central difference in the family parameter 't' or 's'."""
    h = scale * (1.0 + abs(at))
    if name == "t":
        fplus = field.evaluate(point, t=at + h)
        fminus = field.evaluate(point, t=at - h)
    elif name == "s":
        fplus = field.evaluate(point, s=at + h)
        fminus = field.evaluate(point, s=at - h)
    else:
        raise ValueError("parameter must be 't' or 's'")
    return (fplus - fminus) / (2.0 * h)
