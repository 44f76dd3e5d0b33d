"""Exact arithmetic in Q(eps) with eps**2 = q, q prime, and balanced q-integers."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


class QEps:
    """a + b*eps with rational a, b."""

    __slots__ = ("q", "a", "b")

    def __init__(self, q: int, a=0, b=0):
        self.q = q
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)

    # construction helpers
    @classmethod
    def zero(cls, q):
        return cls(q)

    @classmethod
    def one(cls, q):
        return cls(q, 1)

    @classmethod
    def eps(cls, q):
        return cls(q, 0, 1)

    def _coerce(self, other):
        if isinstance(other, QEps):
            if other.q != self.q:
                raise ValueError(f"Q(sqrt {self.q}) vs Q(sqrt {other.q})")
            return other
        if isinstance(other, (int, Fraction)):
            return QEps(self.q, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QEps(self.q, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QEps(self.q, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return QEps(self.q, -self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QEps(self.q, self.a * other, self.b * other)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.a, self.b, o.a, o.b
        return QEps(self.q, a * c + self.q * b * d, a * d + b * c)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.q * self.b * self.b

    def conjugate(self) -> "QEps":
        return QEps(self.q, self.a, -self.b)

    def inverse(self) -> "QEps":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QEps inverse of zero")
        return QEps(self.q, self.a / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QEps(self.q, self.a / other, self.b / other)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QEps(self.q, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QEps):
            return self.q == other.q and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_zero(self) -> bool:
        return not self

    def eps_power(self) -> int | None:
        """k if self == eps**k, else None."""
        if self.b == 0 and self.a != 0:
            k, ok = _log_q(self.a, self.q)
            return 2 * k if ok else None
        if self.a == 0 and self.b != 0:
            k, ok = _log_q(self.b, self.q)
            return 2 * k + 1 if ok else None
        return None

    def signed_eps_power(self) -> tuple[int, int] | None:
        """(sign, k) if self == sign * eps**k."""
        k = self.eps_power()
        if k is not None:
            return (1, k)
        k = (-self).eps_power()
        if k is not None:
            return (-1, k)
        return None

    def to_json(self):
        return [str(self.a), str(self.b)]

    @classmethod
    def from_json(cls, q, obj):
        return cls(q, Fraction(obj[0]), Fraction(obj[1]))

    def __repr__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}e"
        return f"({self.a}+{self.b}e)"


def _log_q(x: Fraction, q: int):
    if x <= 0:
        return 0, False
    num, den = x.numerator, x.denominator
    k = 0
    while num % q == 0:
        num //= q
        k += 1
    while den % q == 0:
        den //= q
        k -= 1
    return k, (num == 1 and den == 1)


@lru_cache(maxsize=None)
def eps_pow(q: int, k: int) -> QEps:
    """eps**k exactly."""
    half, odd = divmod(k, 2)
    scale = Fraction(q) ** half
    return QEps(q, 0, scale) if odd else QEps(q, scale)


@lru_cache(maxsize=None)
def qint(n: int, q: int) -> QEps:
    """Balanced integer [n] = (eps^n - eps^-n)/(eps - eps^-1)."""
    if n < 0:
        return -qint(-n, q)
    out = QEps(q)
    for j in range(n):
        out = out + eps_pow(q, n - 1 - 2 * j)
    return out


@lru_cache(maxsize=None)
def qfactorial(n: int, q: int) -> QEps:
    out = QEps(q, 1)
    for k in range(1, n + 1):
        out = out * qint(k, q)
    return out


def qbinomial(n: int, k: int, q: int) -> QEps:
    if k < 0 or k > n:
        return QEps(q)
    return qfactorial(n, q) / (qfactorial(k, q) * qfactorial(n - k, q))
