"""Polynomial model expressions: parsing, evaluation and monomial expansion.

Grammar (whitespace ignored, no implicit multiplication)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | atom ('^' INT)*
    atom   := NUMBER | 'x' INT | '(' expr ')'

Division and transcendental functions are deliberately unsupported so that
every model has an exact monomial expansion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

MAX_TERMS = 10**6


class ModelSyntaxError(ValueError):
    """Malformed model text; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class ModelResourceError(RuntimeError):
    """Monomial expansion exceeded the term budget."""


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - *
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


Node = Union[Const, Var, Neg, BinOp, Pow]


@dataclass(frozen=True)
class ModelExpr:
    """A parsed model ``F: R^d -> R``."""

    ast: Node
    d: int
    text: str = ""

    def __call__(self, x):
        return evaluate(self, x)

    def __str__(self) -> str:
        return to_string(self)


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)"
    r"|(?P<op>[-+*^()])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append((kind, match.group(kind), start))
        pos = match.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, d: int):
        self.text = text
        self.d = d
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ModelSyntaxError(message, tok[2], self.text)

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] != "op":
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.advance()
            node = BinOp("*", node, self.factor())
        return node

    def factor(self) -> Node:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.advance()
            return Neg(self.factor())
        node = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            node = Pow(node, self.exponent())
        return node

    def exponent(self) -> int:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.error("power must be a non-negative integer")
        if tok[0] != "num":
            self.error(f"expected integer exponent, found {tok[1] or 'end of input'!r}")
        if not tok[1].isdigit():
            self.error(f"power must be a non-negative integer, got {tok[1]!r}")
        self.advance()
        return int(tok[1])

    def atom(self) -> Node:
        tok = self.peek()
        kind, value, pos = tok
        if kind == "num":
            self.advance()
            return Const(float(value))
        if kind == "var":
            self.advance()
            index = int(value[1:])
            if not 1 <= index <= self.d:
                raise ModelSyntaxError(
                    f"variable {value} out of range for d={self.d}", pos, self.text
                )
            return Var(index)
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {value or 'end of input'!r}")


def parse_model(text: str, d: int) -> ModelExpr:
    """Parse ``text`` into a model over ``d`` features.

    Raises:
        ModelSyntaxError: on malformed input, out-of-range variables, or
            exponents that are not non-negative integers.
    """
    if not text or not text.strip():
        raise ModelSyntaxError("empty model", 0, text or "")
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    return ModelExpr(_Parser(text, d).parse(), d, text)


# --- evaluation ------------------------------------------------------------


def _eval(node: Node, X: np.ndarray) -> np.ndarray:
    if isinstance(node, Const):
        return np.full(X.shape[0], node.value)
    if isinstance(node, Var):
        return X[:, node.index - 1]
    if isinstance(node, Neg):
        return -_eval(node.operand, X)
    if isinstance(node, Pow):
        return _eval(node.base, X) ** node.exponent
    left = _eval(node.left, X)
    right = _eval(node.right, X)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    return left * right


def evaluate(F: ModelExpr, x) -> Union[float, np.ndarray]:
    """Evaluate ``F`` at one point (length ``d``) or at the rows of an ``n x d`` array."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    X = arr[None, :] if single else arr
    if X.ndim != 2 or X.shape[1] != F.d:
        raise ValueError(f"expected points with {F.d} coordinates, got shape {arr.shape}")
    # overflow gives inf; callers check finiteness
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(F.ast, X)
    return float(out[0]) if single else out


def fold_constants(F: ModelExpr) -> ModelExpr:
    """Collapse constant sub-expressions."""

    def fold(node):
        if isinstance(node, (Const, Var)):
            return node
        if isinstance(node, Neg):
            inner = fold(node.operand)
            return Const(-inner.value) if isinstance(inner, Const) else Neg(inner)
        if isinstance(node, Pow):
            base = fold(node.base)
            if isinstance(base, Const):
                return Const(base.value ** node.exponent)
            return Pow(base, node.exponent)
        left, right = fold(node.left), fold(node.right)
        if isinstance(left, Const) and isinstance(right, Const):
            a, b = left.value, right.value
            return Const(a + b if node.op == "+" else a - b if node.op == "-" else a * b)
        return BinOp(node.op, left, right)

    return ModelExpr(fold(F.ast), F.d, F.text)


_PRECEDENCE = {"+": 1, "-": 1, "*": 2}


def _fmt_number(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _to_str(node: Node, parent: int = 0) -> str:
    if isinstance(node, Const):
        s = _fmt_number(node.value)
        # a negative literal needs parentheses anywhere but the top level
        return f"({s})" if node.value < 0 and parent > 0 else s
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        s = "-" + _to_str(node.operand, 3)
        return f"({s})" if parent > 0 else s
    if isinstance(node, Pow):
        return f"{_to_str(node.base, 4)}^{node.exponent}"
    prec = _PRECEDENCE[node.op]
    # right operand of '-' needs parentheses at equal precedence
    right_parent = prec + 1 if node.op == "-" else prec
    s = f"{_to_str(node.left, prec)} {node.op} {_to_str(node.right, right_parent)}"
    return f"({s})" if prec < parent else s


def to_string(F: ModelExpr) -> str:
    """Render ``F`` in the input grammar; reparsing yields an equivalent model."""
    return _to_str(F.ast)


# --- monomials -------------------------------------------------------------


@dataclass
class MonomialMap:
    """Polynomial as ``{exponent vector: coefficient}``; zero coefficients are dropped."""

    d: int
    terms: dict[tuple[int, ...], float] = field(default_factory=dict)

    def evaluate(self, x) -> Union[float, np.ndarray]:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        X = arr[None, :] if single else arr
        if X.ndim != 2 or X.shape[1] != self.d:
            raise ValueError(f"expected points with {self.d} coordinates, got shape {arr.shape}")
        out = np.zeros(X.shape[0])
        for kappa, c in self.terms.items():
            term = np.full(X.shape[0], c)
            for i, k in enumerate(kappa):
                if k:
                    term = term * X[:, i] ** k
            out += term
        return float(out[0]) if single else out

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def __len__(self) -> int:
        return len(self.terms)


def _add(a: dict, b: dict, sign: float = 1.0) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + sign * v
    return {k: v for k, v in out.items() if v != 0.0}


def _mul(a: dict, b: dict) -> dict:
    if len(a) * len(b) > MAX_TERMS:
        raise ModelResourceError(f"expansion would exceed {MAX_TERMS} terms")
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0.0) + va * vb
    out = {k: v for k, v in out.items() if v != 0.0}
    if len(out) > MAX_TERMS:
        raise ModelResourceError(f"expansion exceeds {MAX_TERMS} terms")
    return out


def expand_monomials(F: ModelExpr) -> MonomialMap:
    """Fully distribute ``F`` into monomials with like terms collected."""
    d = F.d
    zero = (0,) * d

    def expand(node) -> dict:
        if isinstance(node, Const):
            return {zero: node.value} if node.value != 0.0 else {}
        if isinstance(node, Var):
            k = [0] * d
            k[node.index - 1] = 1
            return {tuple(k): 1.0}
        if isinstance(node, Neg):
            return {k: -v for k, v in expand(node.operand).items()}
        if isinstance(node, Pow):
            base = expand(node.base)
            result = {zero: 1.0}
            e = node.exponent
            # square-and-multiply
            while e:
                if e & 1:
                    result = _mul(result, base)
                e >>= 1
                if e:
                    base = _mul(base, base)
            return result
        left, right = expand(node.left), expand(node.right)
        if node.op == "+":
            return _add(left, right)
        if node.op == "-":
            return _add(left, right, -1.0)
        return _mul(left, right)

    return MonomialMap(d, expand(F.ast))


def is_multilinear(M: MonomialMap) -> bool:
    """True iff every exponent is 0 or 1."""
    return all(k <= 1 for kappa in M.terms for k in kappa)
