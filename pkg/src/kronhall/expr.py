"""A small grammar for naming Hall elements on the command line.

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := INT ['/' INT] | 'e^' INT | 'eps^' INT | '-' factor | '(' expr ')' | atom
    atom   := NAME INT                 e.g. mu1, rho 2, theta0
            | NAME '(' INT (',' INT)* ')'   e.g. ThetaDiv(0,2), Schur(2,1)

Names (case-insensitive): theta, thetadiv, gamma, mu, rho, phi, ptilde, eta,
schur.  Indices are by dimension vector: mu1 has grade (1, 2).
"""
from __future__ import annotations

import re
from fractions import Fraction

from .generators import Generators
from .hall import HallElem
from .qeps import QEps

NAMES = {
    "theta": "Theta", "thetadiv": "ThetaDiv", "gamma": "Gamma", "mu": "Mu", "rho": "Rho",
    "phi": "Phi", "ptilde": "Ptilde", "eta": "Eta", "schur": "Schur",
}

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z]+)|(?P<op>\^|[-+*/(),]))")


class ExpressionError(ValueError):
    pass


def tokenize(text: str) -> list[tuple[str, str]]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, g: Generators):
        self.toks = tokens
        self.i = 0
        self.g = g

    def peek(self, value=None):
        if self.i >= len(self.toks):
            return None
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            return None
        return tok

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise ExpressionError(f"expected {want} at token {self.i}, got {tok[1] if tok else 'end'}")
        self.i += 1
        return tok[1]

    def parse(self):
        v = self.expr()
        if self.peek() is not None:
            raise ExpressionError(f"trailing input at token {self.i}: {self.peek()[1]!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek("+") or self.peek("-"):
            op = self.take()
            w = self.term()
            v = _add(v, w, self.g) if op == "+" else _add(v, _neg(w), self.g)
        return v

    def term(self):
        v = self.factor()
        while self.peek("*"):
            self.take()
            v = _mul(v, self.factor(), self.g)
        return v

    def factor(self):
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression")
        kind, val = tok
        if val == "-":
            self.take()
            return _neg(self.factor())
        if val == "(":
            self.take()
            v = self.expr()
            self.take(value=")")
            return v
        if kind == "int":
            num = int(self.take())
            if self.peek("/"):
                self.take()
                return QEps(self.g.q, Fraction(num, int(self.take("int"))))
            return QEps(self.g.q, num)
        if kind == "name":
            name = self.take().lower()
            if name in ("e", "eps"):
                self.take(value="^")
                sign = -1 if self.peek("-") else 1
                if sign < 0:
                    self.take()
                return self.g.e(sign * int(self.take("int")))
            if name not in NAMES:
                raise ExpressionError(f"unknown element name {name!r}")
            args = self.args()
            try:
                return self.g.named(NAMES[name], *args).element
            except (TypeError, ValueError) as exc:
                raise ExpressionError(f"bad arguments for {name}: {exc}") from exc
        raise ExpressionError(f"unexpected token {val!r}")

    def args(self):
        if self.peek("("):
            self.take()
            vals = [int(self.take("int"))]
            while self.peek(","):
                self.take()
                vals.append(int(self.take("int")))
            self.take(value=")")
            return vals
        tok = self.peek()
        if tok and tok[0] == "int":
            return [int(self.take())]
        raise ExpressionError("element name needs an index")


def _as_elem(v, g):
    return v if isinstance(v, HallElem) else g.alg.unit().scale(v)


def _add(a, b, g):
    if isinstance(a, QEps) and isinstance(b, QEps):
        return a + b
    return _as_elem(a, g) + _as_elem(b, g)


def _neg(a):
    return -a


def _mul(a, b, g):
    if isinstance(a, QEps) and isinstance(b, QEps):
        return a * b
    if isinstance(a, QEps):
        return b.scale(a)
    if isinstance(b, QEps):
        return a.scale(b)
    return g.alg.product(a, b)


def evaluate(text: str, g: Generators) -> HallElem:
    """Parse text and evaluate it in the algebra of g."""
    value = _Parser(tokenize(text), g).parse()
    return _as_elem(value, g)


def builder(text: str):
    """Validate text once and return g -> element, for use across several fields."""
    tokenize(text)
    return lambda g: evaluate(text, g)
