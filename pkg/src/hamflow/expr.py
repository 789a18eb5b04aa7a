"""Symbolic expression core: parsing, printing, differentiation, evaluation.

The expression language covers exactly what the corpus and the demo systems
need: rational constants, the variables x and y, sums, products, integer
powers (negative allowed), sin, cos and ln.  Coefficients are kept as exact
``fractions.Fraction`` values until the numerical boundary.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Union

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Mul",
    "Pow",
    "Func",
    "Monomial",
    "Trig",
    "TermShape",
    "HamFunction",
    "ParseError",
    "NotAHamFunction",
    "parse_expr",
    "parse_ham",
    "add",
    "mul",
    "neg",
    "pow_",
    "func",
    "differentiate",
    "evaluate",
    "print_expr",
    "compile_numpy",
]

MAX_DECIMAL_DIGITS = 9  # decimal literals beyond this are rejected


# ---------------------------------------------------------------------------
# expression trees

@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str  # 'x' or 'y'


@dataclass(frozen=True)
class Add:
    terms: tuple["Expr", ...]


@dataclass(frozen=True)
class Mul:
    factors: tuple["Expr", ...]


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


@dataclass(frozen=True)
class Func:
    name: str  # 'sin' | 'cos' | 'ln'
    arg: "Expr"


Expr = Union[Const, Var, Add, Mul, Pow, Func]

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def add(*terms: Expr) -> Expr:
    """Sum with shallow simplification: flattening, constant folding."""
    flat: list[Expr] = []
    const = Fraction(0)
    for t in terms:
        if isinstance(t, Add):
            parts: Iterable[Expr] = t.terms
        else:
            parts = (t,)
        for p in parts:
            if isinstance(p, Const):
                const += p.value
            else:
                flat.append(p)
    if const != 0:
        flat.append(Const(const))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors: Expr) -> Expr:
    """Product with shallow simplification: flattening, zero/one elimination
    and merging of repeated bases (x * x^-1 folds away)."""
    flat: list[Expr] = []
    const = Fraction(1)
    for f in factors:
        if isinstance(f, Mul):
            parts: Iterable[Expr] = f.factors
        else:
            parts = (f,)
        for p in parts:
            if isinstance(p, Const):
                const *= p.value
            else:
                flat.append(p)
    if const == 0:
        return ZERO
    # merge factors sharing a base, preserving first-occurrence order
    exps: dict[Expr, int] = {}
    for p in flat:
        base, e = (p.base, p.exp) if isinstance(p, Pow) else (p, 1)
        exps[base] = exps.get(base, 0) + e
    merged = [pow_(base, e) for base, e in exps.items() if e != 0]
    merged = [m for m in merged if not (isinstance(m, Const) and m.value == 1)]
    if not merged:
        return Const(const)
    if const != 1:
        merged.insert(0, Const(const))
    if len(merged) == 1:
        return merged[0]
    return Mul(tuple(merged))


def neg(e: Expr) -> Expr:
    if isinstance(e, Add):
        return add(*(neg(t) for t in e.terms))
    return mul(Const(Fraction(-1)), e)


def pow_(base: Expr, exp: int) -> Expr:
    if exp == 1:
        return base
    if exp == 0:
        return ONE
    if isinstance(base, Const) and (exp > 0 or base.value != 0):
        return Const(base.value ** exp)
    if isinstance(base, Pow):
        return pow_(base.base, base.exp * exp)
    return Pow(base, exp)


def func(name: str, arg: Expr) -> Expr:
    return Func(name, arg)


# ---------------------------------------------------------------------------
# differentiation

def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic partial derivative with shallow simplification."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Add):
        return add(*(differentiate(t, var) for t in e.terms))
    if isinstance(e, Mul):
        parts = []
        for i, f in enumerate(e.factors):
            rest = e.factors[:i] + e.factors[i + 1:]
            parts.append(mul(differentiate(f, var), *rest))
        return add(*parts)
    if isinstance(e, Pow):
        return mul(Const(Fraction(e.exp)), pow_(e.base, e.exp - 1),
                   differentiate(e.base, var))
    if isinstance(e, Func):
        inner = differentiate(e.arg, var)
        if e.name == "sin":
            return mul(func("cos", e.arg), inner)
        if e.name == "cos":
            return mul(Const(Fraction(-1)), func("sin", e.arg), inner)
        if e.name == "ln":
            return mul(pow_(e.arg, -1), inner)
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# evaluation

def _eval(e: Expr, x: float, y: float) -> float:
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        return x if e.name == "x" else y
    if isinstance(e, Add):
        return sum(_eval(t, x, y) for t in e.terms)
    if isinstance(e, Mul):
        r = 1.0
        for f in e.factors:
            r *= _eval(f, x, y)
        return r
    if isinstance(e, Pow):
        return _eval(e.base, x, y) ** e.exp
    if isinstance(e, Func):
        v = _eval(e.arg, x, y)
        if e.name == "sin":
            return math.sin(v)
        if e.name == "cos":
            return math.cos(v)
        return math.log(v)
    raise TypeError(f"not an expression: {e!r}")


def evaluate(e: Expr, point: tuple[float, float]) -> float:
    """IEEE-double evaluation; domain violations come back as NaN, never raise."""
    try:
        v = _eval(e, float(point[0]), float(point[1]))
    except (ValueError, ZeroDivisionError, OverflowError):
        return math.nan
    return v if math.isfinite(v) else math.nan


def _numpy_src(e: Expr) -> str:
    if isinstance(e, Const):
        return f"({float(e.value)!r})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        return "(" + " + ".join(_numpy_src(t) for t in e.terms) + ")"
    if isinstance(e, Mul):
        return "(" + " * ".join(_numpy_src(f) for f in e.factors) + ")"
    if isinstance(e, Pow):
        return f"({_numpy_src(e.base)} ** ({e.exp}))"
    if isinstance(e, Func):
        fn = {"sin": "np.sin", "cos": "np.cos", "ln": "np.log"}[e.name]
        return f"{fn}({_numpy_src(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


def compile_numpy(e: Expr) -> Callable:
    """Compile to a vectorized numpy callable.

    Non-finite results are mapped to NaN, matching :func:`evaluate`.
    Constant expressions broadcast to the input shape.
    """
    import numpy as np

    src = f"lambda x, y: {_numpy_src(e)}"
    raw = eval(src, {"np": np})  # noqa: S307 - source built from our own AST

    def fn(x, y):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        with np.errstate(all="ignore"):
            r = raw(x, y)
        r = np.asarray(r, dtype=np.float64)
        if r.shape != x.shape:
            r = np.broadcast_to(r, x.shape).copy()
        else:
            r = r.copy()
        r[~np.isfinite(r)] = np.nan
        return r

    return fn


# ---------------------------------------------------------------------------
# term shapes and corpus functions

_TRIG_ORDER = {("sin", "x"): 0, ("sin", "y"): 1, ("cos", "x"): 2, ("cos", "y"): 3}


@dataclass(frozen=True)
class Monomial:
    h: int  # power of x
    k: int  # power of y

    def __post_init__(self):
        if self.h < 0 or self.k < 0 or self.h + self.k < 1:
            raise ValueError(f"invalid monomial shape x^{self.h}*y^{self.k}")

    def order_key(self) -> tuple:
        return (0, self.h + self.k, -self.h)

    def to_expr(self) -> Expr:
        return mul(pow_(Var("x"), self.h), pow_(Var("y"), self.k))

    def __str__(self) -> str:
        parts = []
        if self.h:
            parts.append("x" if self.h == 1 else f"x^{self.h}")
        if self.k:
            parts.append("y" if self.k == 1 else f"y^{self.k}")
        return "*".join(parts)


@dataclass(frozen=True)
class Trig:
    fn: str  # 'sin' | 'cos'
    var: str  # 'x' | 'y'

    def __post_init__(self):
        if (self.fn, self.var) not in _TRIG_ORDER:
            raise ValueError(f"invalid trig shape {self.fn}({self.var})")

    def order_key(self) -> tuple:
        return (1, _TRIG_ORDER[(self.fn, self.var)])

    def to_expr(self) -> Expr:
        return func(self.fn, Var(self.var))

    def __str__(self) -> str:
        return f"{self.fn}({self.var})"


TermShape = Union[Monomial, Trig]


class NotAHamFunction(ValueError):
    """Raised when an expression is not a nonzero linear combination of shapes."""


def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class HamFunction:
    """Nonzero linear combination of monomial/trig shapes, exact coefficients.

    Terms are stored in canonical shape order; no zero coefficients, no
    duplicate shapes.  Construct through :meth:`from_terms` or
    :func:`parse_ham`.
    """

    terms: tuple[tuple[Fraction, TermShape], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Fraction, TermShape]]) -> "HamFunction":
        acc: dict[TermShape, Fraction] = {}
        for c, s in terms:
            acc[s] = acc.get(s, Fraction(0)) + Fraction(c)
        cleaned = [(c, s) for s, c in acc.items() if c != 0]
        if not cleaned:
            raise NotAHamFunction("constant/empty function is not a HamFunction")
        cleaned.sort(key=lambda cs: cs[1].order_key())
        return cls(tuple(cleaned))

    def to_expr(self) -> Expr:
        return add(*(mul(Const(c), s.to_expr()) for c, s in self.terms))

    def shapes(self) -> tuple[TermShape, ...]:
        return tuple(s for _, s in self.terms)

    def __str__(self) -> str:
        out = []
        for i, (c, s) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = str(s) if mag == 1 else f"{format_coeff(mag)}*{s}"
            if i == 0:
                out.append(body if sign == "+" else "-" + body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d+|\.\d+|\d+)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _number_to_fraction(text: str, pos: int) -> Fraction:
    if "." in text:
        frac_digits = len(text.split(".", 1)[1])
        if frac_digits > MAX_DECIMAL_DIGITS:
            raise ParseError(
                f"decimal literal with more than {MAX_DECIMAL_DIGITS} "
                "fractional digits", pos)
    return Fraction(text)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> Expr:
        e = self.expression()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return e

    def expression(self) -> Expr:
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                e = add(e, rhs if val == "+" else neg(rhs))
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                if val == "*":
                    e = mul(e, rhs)
                elif isinstance(e, Const) and isinstance(rhs, Const) and rhs.value != 0:
                    e = Const(e.value / rhs.value)
                else:
                    e = mul(e, pow_(rhs, -1))
            else:
                return e

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return inner if val == "+" else neg(inner)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return pow_(base, self.exponent())
        return base

    def exponent(self) -> int:
        kind, val, pos = self.take()
        if kind == "op" and val == "(":
            e = self.exponent()
            self.expect_op(")")
            return e
        sign = 1
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            kind, val, pos = self.take()
        if kind != "num" or "." in val:
            raise ParseError("exponent must be an integer", pos)
        return sign * int(val)

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(_number_to_fraction(val, pos))
        if kind == "name":
            if val in ("x", "y"):
                return Var(val)
            if val in ("sin", "cos", "ln", "log"):
                self.expect_op("(")
                arg = self.expression()
                self.expect_op(")")
                return func("ln" if val == "log" else val, arg)
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            e = self.expression()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_expr(text: str) -> Expr:
    """Parse the documented infix grammar into an expression tree."""
    return _Parser(text).parse()


def _collect_term(e: Expr) -> tuple[Fraction, TermShape | None]:
    """Decompose one additive term into (coefficient, shape).

    shape is None for a pure constant term.  Raises NotAHamFunction for
    anything outside coefficient * monomial/trig form.
    """
    coeff = Fraction(1)
    h = k = 0
    trig: Trig | None = None
    factors = e.factors if isinstance(e, Mul) else (e,)
    for f in factors:
        if isinstance(f, Const):
            coeff *= f.value
        elif isinstance(f, Var):
            if f.name == "x":
                h += 1
            else:
                k += 1
        elif isinstance(f, Pow) and isinstance(f.base, Var) and f.exp > 0:
            if f.base.name == "x":
                h += f.exp
            else:
                k += f.exp
        elif isinstance(f, Func) and f.name in ("sin", "cos") and isinstance(f.arg, Var):
            if trig is not None or h or k:
                raise NotAHamFunction(f"term not a basis shape: {print_expr(e)}")
            trig = Trig(f.name, f.arg.name)
        else:
            raise NotAHamFunction(f"term not a basis shape: {print_expr(e)}")
    if trig is not None:
        if h or k:
            raise NotAHamFunction(f"term not a basis shape: {print_expr(e)}")
        return coeff, trig
    if h + k == 0:
        return coeff, None
    return coeff, Monomial(h, k)


def ham_from_expr(e: Expr) -> HamFunction:
    terms = e.terms if isinstance(e, Add) else (e,)
    collected = []
    for t in terms:
        c, s = _collect_term(t)
        if s is None:
            if c != 0:
                raise NotAHamFunction("constant terms are excluded")
            continue
        collected.append((c, s))
    return HamFunction.from_terms(collected)


def parse_ham(text: str) -> HamFunction:
    """Parse a corpus function; rejects constants and non-basis terms."""
    return ham_from_expr(parse_expr(text))


def parse_term_sequence(text: str) -> list[tuple[Fraction, TermShape]]:
    """Tokens of a function in the order written (for order-sensitive
    measures); no canonical reordering, zero terms dropped."""
    e = parse_expr(text)
    out = []
    for t in (e.terms if isinstance(e, Add) else (e,)):
        c, s = _collect_term(t)
        if s is None:
            if c != 0:
                raise NotAHamFunction("constant terms are excluded")
            continue
        if c != 0:
            out.append((c, s))
    return out


# ---------------------------------------------------------------------------
# printing

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def _prec(e: Expr) -> int:
    if isinstance(e, Add):
        return _PREC_ADD
    if isinstance(e, Mul):
        return _PREC_MUL
    if isinstance(e, Const):
        return _PREC_ATOM if e.value >= 0 and e.value.denominator == 1 else _PREC_MUL
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(e: Expr, parent_prec: int) -> str:
    s = print_expr(e)
    return f"({s})" if _prec(e) < parent_prec else s


def print_expr(e: Expr) -> str:
    """Deterministic canonical infix form; reparses to the same tree."""
    if isinstance(e, Const):
        return format_coeff(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({print_expr(e.arg)})"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _PREC_ATOM)}^{e.exp}"
    if isinstance(e, Mul):
        factors = e.factors
        prefix = ""
        if isinstance(factors[0], Const) and factors[0].value == -1 and len(factors) > 1:
            prefix = "-"
            factors = factors[1:]
        body = "*".join(_wrap(f, _PREC_MUL + 1) if isinstance(f, (Add, Mul))
                        else _wrap(f, _PREC_MUL) for f in factors)
        return prefix + body
    if isinstance(e, Add):
        out = []
        for i, t in enumerate(e.terms):
            sign = "+"
            body_expr = t
            if isinstance(t, Const) and t.value < 0:
                sign = "-"
                body_expr = Const(-t.value)
            elif (isinstance(t, Mul) and isinstance(t.factors[0], Const)
                  and t.factors[0].value < 0):
                sign = "-"
                body_expr = mul(Const(-t.factors[0].value), *t.factors[1:])
            body = _wrap(body_expr, _PREC_MUL)
            if i == 0:
                out.append(body if sign == "+" else "-" + body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)
    raise TypeError(f"not an expression: {e!r}")


def print_canonical(f: "HamFunction | Expr") -> str:
    if isinstance(f, HamFunction):
        return str(f)
    return print_expr(f)
