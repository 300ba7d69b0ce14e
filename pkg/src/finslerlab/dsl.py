"""A small expression language for user-defined metrics.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] int)?
    atom   := number | ident | fn '(' expr (',' expr)* ')' | '(' expr ')'

so ``-x^2`` is ``-(x^2)`` and ``+ - * /`` associate to the left.

Identifiers: ``i`` (imaginary unit); indexed coordinates ``z1``/``z_1`` and
``v1``/``v_1`` for complex metrics, ``x1``/``u1`` for real ones; the bare
vector groups ``z, v`` (``x, u``), which may only appear as arguments of
``normsq`` and ``herm``; and declared parameter names.

Functions: ``re im conj abs sqrt exp`` (one scalar argument),
``normsq(w)`` (``sum |w_k|^2`` for a group, ``|w|^2`` for a scalar) and
``herm(a, b) = sum_k a_k conj(b_k)`` over two vector groups.

Error positions are 1-based character columns; end of input is reported at
``len(source) + 1``.
"""

import math
import re as _re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import hyperdual as hd
from .errors import DivisionNearZero, FinslerError, ResidualImaginaryPart, UsageError
from .metrics import COMPLEX, REAL, MetricField

MAX_DEPTH = 64
MAX_EXPONENT = 64
IMAG_TOL = 1e-12

SCALAR_FUNCTIONS = ("re", "im", "conj", "abs", "sqrt", "exp")
VECTOR_FUNCTIONS = ("normsq", "herm")
FUNCTIONS = SCALAR_FUNCTIONS + VECTOR_FUNCTIONS
NONSMOOTH = ("abs", "sqrt")
GROUPS = {REAL: ("x", "u"), COMPLEX: ("z", "v")}


class DslError(FinslerError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class DslSyntaxError(DslError):
    pass


class UnknownIdentifier(DslError):
    pass


class ArityError(DslError):
    pass


class IndexOutOfRange(DslError):
    pass


# ---------------------------------------------------------------- AST

@dataclass(frozen=True)
class Num:
    value: float
    pos: int = 0


@dataclass(frozen=True)
class Imag:
    pos: int = 0


@dataclass(frozen=True)
class Var:
    group: str
    index: int  # 0-based
    pos: int = 0


@dataclass(frozen=True)
class Group:
    group: str
    pos: int = 0


@dataclass(frozen=True)
class Param:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int = 0


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    pos: int = 0


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    pos: int = 0

    @property
    def nonsmooth(self):
        """sqrt/abs are not differentiable where their argument vanishes."""
        return self.fn in NONSMOOTH


@dataclass(frozen=True)
class Expr:
    """A parsed, validated expression together with its declaration."""

    root: object
    kind: str
    dim: int
    params: tuple
    source: str

    @property
    def groups(self):
        return GROUPS[self.kind]


# ---------------------------------------------------------------- lexer

_TOKEN = _re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", _re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | ident | op | end
    text: str
    pos: int


def tokenize(source: str) -> list[_Tok]:
    toks = []
    i = 0
    while i < len(source):
        m = _TOKEN.match(source, i)
        if m is None:
            raise DslSyntaxError(f"unexpected character {source[i]!r}", i + 1)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), i + 1))
        i = m.end()
    toks.append(_Tok("end", "", len(source) + 1))
    return toks


# ---------------------------------------------------------------- parser

_INDEXED = _re.compile(r"^([a-z])_?([0-9]+)$")


class _Parser:
    def __init__(self, source, kind, dim, params):
        self.toks = tokenize(source)
        self.k = 0
        self.kind = kind
        self.dim = dim
        self.params = tuple(params)
        self.depth = 0

    @property
    def tok(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.text != text or t.kind == "end":
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise DslSyntaxError(f"expected {text!r}, found {found}", t.pos)
        return self.take()

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise DslSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return node

    def expr(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise DslSyntaxError("expression nested too deeply", self.tok.pos)
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.take()
            node = BinOp(t.text, node, self.term(), t.pos)
        self.depth -= 1
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.take()
            node = BinOp(t.text, node, self.unary(), t.pos)
        return node

    def unary(self):
        signs = []
        while self.tok.kind == "op" and self.tok.text == "-":
            signs.append(self.take().pos)
        node = self.power()
        # --a is a; keep the tree shallow for long sign runs
        return Neg(node, signs[0]) if len(signs) % 2 else node

    def power(self):
        node = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            t = self.take()
            sign = 1
            if self.tok.kind == "op" and self.tok.text == "-":
                self.take()
                sign = -1
            if self.tok.kind != "num" or not self.tok.text.isdigit():
                raise DslSyntaxError("exponent must be an integer literal", self.tok.pos)
            n = int(self.take().text)
            if n > MAX_EXPONENT:
                raise DslSyntaxError(f"exponent larger than {MAX_EXPONENT}", t.pos)
            node = Pow(node, sign * n, t.pos)
        if isinstance(node, Group):
            raise DslSyntaxError(f"vector group {node.group!r} used as a scalar", node.pos)
        return node

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            val = float(t.text)
            if not math.isfinite(val):
                raise DslSyntaxError("number out of range", t.pos)
            return Num(val, t.pos)
        if t.kind == "ident":
            self.take()
            if t.text in FUNCTIONS:
                return self.call(t)
            return self.identifier(t)
        if t.kind == "op" and t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise DslSyntaxError(f"expected a number, identifier or '(', found {found}", t.pos)

    def call(self, name_tok):
        self.expect("(")
        args = [self.argument()]
        while self.tok.kind == "op" and self.tok.text == ",":
            self.take()
            args.append(self.argument())
        self.expect(")")
        fn = name_tok.text
        want = 2 if fn == "herm" else 1
        if len(args) != want:
            raise ArityError(f"{fn} takes {want} argument(s), got {len(args)}", name_tok.pos)
        for a in args:
            if isinstance(a, Group) and fn not in VECTOR_FUNCTIONS:
                raise DslSyntaxError(f"vector group {a.group!r} passed to scalar function {fn}", a.pos)
        if fn == "herm":
            for a in args:
                if not isinstance(a, Group):
                    raise ArityError("herm takes two vector groups, e.g. herm(z,v)", a.pos)
        return Call(fn, tuple(args), name_tok.pos)

    def argument(self):
        # a bare vector group is allowed here, and only here
        t = self.tok
        if t.kind == "ident" and t.text in GROUPS[self.kind]:
            self.take()
            return Group(t.text, t.pos)
        return self.expr()

    def identifier(self, t):
        name = t.text
        if name in self.params:
            return Param(name, t.pos)
        if name == "i":
            return Imag(t.pos)
        if name in GROUPS[self.kind]:
            return Group(name, t.pos)
        m = _INDEXED.match(name)
        if m and m.group(1) in GROUPS[self.kind]:
            idx = int(m.group(2))
            if not 1 <= idx <= self.dim:
                raise IndexOutOfRange(f"{name}: index must lie in 1..{self.dim}", t.pos)
            return Var(m.group(1), idx - 1, t.pos)
        raise UnknownIdentifier(f"unknown identifier {name!r}", t.pos)


def parse(source, kind: str = COMPLEX, dim: int = 2, param_names: Sequence[str] = ()) -> Expr:
    """Parse and validate a metric expression.

    Raises a :class:`DslError` subclass (carrying ``.position``) on malformed
    input; never anything else for string input.
    """
    if isinstance(source, (bytes, bytearray)):
        source = source.decode("latin-1")
    if kind not in GROUPS:
        raise UsageError(f"unknown kind {kind!r}")
    if not source.strip():
        raise DslSyntaxError("empty expression", 1)
    for p in param_names:
        if not _re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", p) or p in FUNCTIONS or p == "i" \
                or p in GROUPS[kind]:
            raise UsageError(f"invalid parameter name {p!r}")
    root = _Parser(source, kind, int(dim), param_names).parse()
    return Expr(root, kind, int(dim), tuple(param_names), source)


# ---------------------------------------------------------------- evaluation

def _check_divisor(d):
    val = hd.value_of(d)
    if np.any(np.abs(val) < hd.TINY):
        raise DivisionNearZero("division by a value within 1e-30 of zero")


def _ev(node, env):
    match node:
        case Num(value=val):
            return val
        case Imag():
            return 1j
        case Var(group=g, index=k):
            return env[g][k]
        case Param(name=name):
            return env[name]
        case Neg(operand=a):
            return -_ev(a, env)
        case BinOp(op=op, left=a, right=b):
            x, y = _ev(a, env), _ev(b, env)
            if op == "+":
                return x + y
            if op == "-":
                return x - y
            if op == "*":
                return x * y
            _check_divisor(y)
            if not isinstance(x, hd.HyperDual) and isinstance(y, hd.HyperDual):
                return x * y.reciprocal()
            return x / y
        case Pow(base=a, exponent=n):
            x = _ev(a, env)
            if n < 0:
                _check_divisor(x)
                if not isinstance(x, hd.HyperDual):
                    return 1.0 / x ** (-n)
            return x ** n
        case Call(fn=fn, args=args):
            return _call(fn, args, env)
    raise TypeError(f"not an expression node: {node!r}")


def _call(fn, args, env):
    if fn == "herm":
        a, b = (env[g.group] for g in args)
        total = 0.0
        for p, q in zip(a, b):
            total = total + p * hd.conj(q)
        return total
    if fn == "normsq":
        (arg,) = args
        items = env[arg.group] if isinstance(arg, Group) else [_ev(arg, env)]
        total = 0.0
        for w in items:
            total = total + hd.re(w * hd.conj(w))
        return total
    x = _ev(args[0], env)
    if fn == "re":
        return hd.re(x)
    if fn == "im":
        return hd.im(x)
    if fn == "conj":
        return hd.conj(x)
    if fn == "abs":
        return hd.cabs(x)
    if fn == "sqrt":
        return hd.sqrt(x)
    if fn == "exp":
        return hd.exp(x)
    raise TypeError(fn)


def _bindings(expr: Expr, bindings: Mapping):
    env = {}
    for g in expr.groups:
        if g not in bindings:
            raise UsageError(f"missing binding for {g!r}")
        seq = list(bindings[g])
        if len(seq) != expr.dim:
            raise UsageError(f"binding {g!r} has length {len(seq)}, expected {expr.dim}")
        env[g] = seq
    for p in expr.params:
        if p not in bindings:
            raise UsageError(f"missing binding for parameter {p!r}")
        env[p] = bindings[p]
    return env


def _realify(val):
    """Strip the (negligible) imaginary part of a metric value."""
    head = np.asarray(hd.value_of(val))
    if np.iscomplexobj(head):
        if np.any(np.abs(head.imag) > IMAG_TOL):
            raise ResidualImaginaryPart(
                f"expression has imaginary part {np.max(np.abs(head.imag)):.3g}")
        return hd.re(val)
    return val


def evaluate(expr: Expr, bindings: Mapping):
    """Evaluate ``expr`` over any scalar field the bindings are drawn from.

    ``bindings`` maps the two vector groups (``z``/``v`` or ``x``/``u``) to
    sequences of scalars and every declared parameter to a scalar.  The
    result is real-valued: an imaginary part above ``1e-12`` raises
    :class:`ResidualImaginaryPart`.
    """
    return _realify(_ev(expr.root, _bindings(expr, bindings)))


def to_metric(expr: Expr, params: Mapping[str, float] | None = None, name: str = "expr",
              domain=None) -> MetricField:
    """Wrap a parsed expression as a :class:`MetricField`."""
    params = dict(params or {})
    missing = set(expr.params) - set(params)
    if missing:
        raise UsageError(f"no value for parameter(s) {sorted(missing)}")
    base_g, tan_g = expr.groups
    root = expr.root
    fixed = {p: float(params[p]) for p in expr.params}

    def evaluator(base, tangent):
        env = {base_g: list(base), tan_g: list(tangent), **fixed}
        return _realify(_ev(root, env))

    kw = {} if domain is None else {"domain": domain}
    return MetricField(name, expr.kind, expr.dim, evaluator, fixed, expression=expr.source, **kw)


def metric_from_source(source: str, kind: str = COMPLEX, dim: int = 2,
                       params: Mapping[str, float] | None = None, name: str = "expr") -> MetricField:
    params = dict(params or {})
    return to_metric(parse(source, kind, dim, list(params)), params, name)
