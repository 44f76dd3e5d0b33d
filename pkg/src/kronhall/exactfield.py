"""Exact arithmetic over small prime fields.

Matrices are handled as tuples of row tuples of residues; the helpers below
never mutate their inputs.  Polynomials are coefficient tuples, low degree
first, with trailing zeros stripped (the zero polynomial is ``()``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as cartesian

SUPPORTED_PRIMES = (2, 3, 5, 7, 11)


class FieldMismatch(ValueError):
    pass


def check_prime(p: int) -> int:
    if p not in SUPPORTED_PRIMES:
        raise ValueError(f"unsupported field size {p}; expected one of {SUPPORTED_PRIMES}")
    return p


@lru_cache(maxsize=None)
def inverses(p: int) -> tuple:
    inv = [0] * p
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return tuple(inv)


@dataclass(frozen=True)
class Fq:
    """An element of the prime field F_p."""

    p: int
    value: int

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _other(self, other):
        if isinstance(other, Fq):
            if other.p != self.p:
                raise FieldMismatch(f"F_{self.p} vs F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Fq(self.p, self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Fq(self.p, self.value - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Fq(self.p, o - self.value)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Fq(self.p, self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return Fq(self.p, -self.value)

    def inverse(self) -> "Fq":
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return Fq(self.p, inverses(self.p)[self.value])

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * Fq(self.p, o).inverse()

    def __int__(self):
        return self.value


# ---------------------------------------------------------------------------
# matrices


def zeros(rows: int, cols: int) -> tuple:
    return tuple((0,) * cols for _ in range(rows))


def identity(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m, cols: int | None = None) -> tuple:
    if not m:
        return tuple(() for _ in range(cols or 0))
    return tuple(zip(*m))


def matmul(a, b, p: int, inner: int | None = None, cols: int | None = None) -> tuple:
    """Product of an r x k and a k x c matrix; dimensions may be passed for empties."""
    if not a:
        return ()
    k = len(a[0]) if inner is None else inner
    c = (len(b[0]) if b else 0) if cols is None else cols
    if k == 0:
        return tuple((0,) * c for _ in a)
    bt = tuple(zip(*b)) if c else ()
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) % p for col in bt) if c else ()
                 for row in a)


def matvec(a, v, p: int) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) % p for row in a)


def rref(rows, p: int, ncols: int | None = None):
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return (), ()
    n = len(m[0]) if ncols is None else ncols
    inv = inverses(p)
    pivots = []
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        s = inv[row[c] % p]
        if s != 1:
            row = [(x * s) % p for x in row]
        else:
            row = [x % p for x in row]
        m[r] = row
        for i in range(len(m)):
            if i != r:
                f = m[i][c] % p
                if f:
                    mi = m[i]
                    m[i] = [(x - f * y) % p for x, y in zip(mi, row)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(x % p for x in row) for row in m[:r]), tuple(pivots)


def _rank_gf2(rows) -> int:
    basis = {}
    rank = 0
    for row in rows:
        v = 0
        for bit, x in enumerate(row):
            if x & 1:
                v |= 1 << bit
        while v:
            top = v.bit_length() - 1
            if top in basis:
                v ^= basis[top]
            else:
                basis[top] = v
                rank += 1
                break
    return rank


def rank(rows, p: int) -> int:
    if not rows or not rows[0]:
        return 0
    if p == 2:
        return _rank_gf2(rows)
    return len(rref(rows, p)[1])


def solve_kernel(a, p: int, ncols: int | None = None) -> tuple:
    """Basis of {v : a v = 0}; ``ncols`` is needed when ``a`` has no rows."""
    n = (len(a[0]) if a else 0) if ncols is None else ncols
    if not a:
        return identity(n)
    red, piv = rref(a, p, n)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, pc in zip(red, piv):
            v[pc] = (-row[f]) % p
        basis.append(tuple(v))
    return tuple(basis)


def left_kernel(a, p: int, nrows: int) -> tuple:
    """Basis of {u : u a = 0} for an nrows x k matrix."""
    if not a or not a[0]:
        return identity(nrows)
    return solve_kernel(transpose(a), p, nrows)


def det(m, p: int) -> int:
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    inv = inverses(p)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] % p), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d = d * a[c][c] % p
        s = inv[a[c][c] % p]
        for i in range(c + 1, n):
            f = a[i][c] * s % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
    return d % p


@dataclass(frozen=True)
class MatrixFq:
    """An immutable matrix over F_p."""

    p: int
    rows: int
    cols: int
    entries: tuple

    @classmethod
    def from_rows(cls, p: int, rows, cols: int | None = None) -> "MatrixFq":
        entries = tuple(tuple(int(x) % p for x in r) for r in rows)
        ncols = (len(entries[0]) if entries else 0) if cols is None else cols
        if any(len(r) != ncols for r in entries):
            raise ValueError("ragged matrix")
        return cls(check_prime(p), len(entries), ncols, entries)

    def _same_field(self, other: "MatrixFq"):
        if other.p != self.p:
            raise FieldMismatch(f"F_{self.p} vs F_{other.p}")

    def __matmul__(self, other: "MatrixFq") -> "MatrixFq":
        self._same_field(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        prod = matmul(self.entries, other.entries, self.p, self.cols, other.cols)
        return MatrixFq(self.p, self.rows, other.cols, prod)

    def __add__(self, other: "MatrixFq") -> "MatrixFq":
        self._same_field(other)
        return MatrixFq(self.p, self.rows, self.cols, tuple(
            tuple((x + y) % self.p for x, y in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def rank(self) -> int:
        return rank(self.entries, self.p)

    def kernel(self) -> tuple:
        return solve_kernel(self.entries, self.p, self.cols)

    def apply(self, v) -> tuple:
        return matvec(self.entries, v, self.p)


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class SubspaceFq:
    """A subspace of F_p^n stored by its reduced row echelon basis."""

    p: int
    ambient: int
    basis: tuple
    pivots: tuple

    @classmethod
    def span(cls, p: int, ambient: int, vectors) -> "SubspaceFq":
        vecs = [tuple(v) for v in vectors]
        if not vecs:
            return cls(p, ambient, (), ())
        red, piv = rref(vecs, p, ambient)
        return cls(p, ambient, red, piv)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, v) -> tuple:
        """Coordinates of a vector of this subspace in the echelon basis."""
        return tuple(v[c] for c in self.pivots)

    def contains(self, v) -> bool:
        p = self.p
        w = list(v)
        for row, c in zip(self.basis, self.pivots):
            f = w[c] % p
            if f:
                w = [(x - f * y) % p for x, y in zip(w, row)]
        return not any(x % p for x in w)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


@lru_cache(maxsize=None)
def _rref_bases(n: int, k: int, p: int) -> tuple:
    out = []
    for piv in _combinations(n, k):
        pivset = set(piv)
        free_slots = [(i, c) for i, pc in enumerate(piv) for c in range(pc + 1, n) if c not in pivset]
        for values in cartesian(range(p), repeat=len(free_slots)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(piv):
                rows[i][pc] = 1
            for (i, c), val in zip(free_slots, values):
                rows[i][c] = val
            out.append((tuple(tuple(r) for r in rows), piv))
    return tuple(out)


def _combinations(n, k):
    from itertools import combinations
    return combinations(range(n), k)


def enumerate_subspaces(n: int, k: int, q: int) -> list[SubspaceFq]:
    """All k-dimensional subspaces of F_q^n, each in canonical echelon form."""
    check_prime(q)
    if k < 0 or k > n:
        raise ValueError(f"no {k}-dimensional subspaces of an {n}-dimensional space")
    return [SubspaceFq(q, n, basis, piv) for basis, piv in _rref_bases(n, k, q)]


def subspace_bases(n: int, k: int, q: int) -> tuple:
    """Raw (basis, pivots) pairs; the fast path used by the enumerators."""
    return _rref_bases(n, k, q)


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient tuples, low degree first)


def ptrim(a) -> tuple:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def pdeg(a) -> int:
    return len(a) - 1


def padd(a, b, p):
    n = max(len(a), len(b))
    return ptrim(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n))


def psub(a, b, p):
    n = max(len(a), len(b))
    return ptrim(((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n))


def pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return ptrim(out)


def pscale(a, s, p):
    return ptrim((x * s) % p for x in a)


def pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = inverses(p)[b[-1]]
    db = len(b) - 1
    quot = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * inv % p
        if c:
            quot[i - db] = c
            for j, y in enumerate(b):
                a[i - db + j] = (a[i - db + j] - c * y) % p
    return ptrim(quot), ptrim(a[:db])


def ppow(a, e, p):
    out = (1,)
    for _ in range(e):
        out = pmul(out, a, p)
    return out


def monic(a, p):
    if not a:
        raise ValueError("zero polynomial")
    return pscale(a, inverses(p)[a[-1]], p)


@lru_cache(maxsize=None)
def irreducibles_of_degree(d: int, q: int) -> tuple:
    check_prime(q)
    if d < 1:
        raise ValueError("degree must be at least 1")
    if d == 1:
        return tuple((c, 1) for c in range(q))
    smaller = [f for e in range(1, d // 2 + 1) for f in irreducibles_of_degree(e, q)]
    out = []
    for low in cartesian(range(q), repeat=d):
        f = tuple(low) + (1,)
        if f[0] == 0:
            continue
        if all(pdivmod(f, g, q)[1] for g in smaller):
            out.append(f)
    return tuple(out)


def irreducibles_up_to(d: int, q: int) -> list[tuple]:
    """Monic irreducible polynomials of degree 1..d over F_q."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    return [f for e in range(1, d + 1) for f in irreducibles_of_degree(e, q)]


# ---------------------------------------------------------------------------
# binary forms and closed points of P^1


@dataclass(frozen=True, order=True)
class ClosedPoint:
    """A closed point of P^1 over F_q: ``poly is None`` is the point at infinity.

    Finite points are monic irreducible polynomials in t = lambda/mu.  The
    sort key puts infinity first, then orders by coefficient array.
    """

    sort_key: tuple
    poly: tuple | None

    @classmethod
    def infinity(cls) -> "ClosedPoint":
        return cls((0,), None)

    @classmethod
    def finite(cls, poly) -> "ClosedPoint":
        poly = tuple(poly)
        if not poly or poly[-1] != 1:
            raise ValueError(f"closed point polynomial must be monic: {poly}")
        return cls((1, len(poly)) + poly, poly)

    @property
    def is_infinity(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else len(self.poly) - 1

    def homogenized(self) -> tuple:
        """Coefficients (low lambda-degree first) of the binary form of this point."""
        return (1, 0) if self.poly is None else self.poly

    def to_json(self):
        return "inf" if self.poly is None else list(self.poly)

    @classmethod
    def from_json(cls, obj) -> "ClosedPoint":
        return cls.infinity() if obj == "inf" else cls.finite(obj)

    def __repr__(self):
        if self.poly is None:
            return "inf"
        terms = []
        for i, c in enumerate(self.poly):
            if c:
                mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(mono if c == 1 and i else f"{c}" if i == 0 else f"{c}{mono}")
        return "+".join(reversed(terms))


def verify_irreducible(poly, q: int) -> bool:
    poly = ptrim(poly)
    d = pdeg(poly)
    if d < 1:
        return False
    for e in range(1, d // 2 + 1):
        for g in irreducibles_of_degree(e, q):
            if not pdivmod(poly, g, q)[1]:
                return False
    return True


@dataclass(frozen=True)
class BinaryFormFq:
    """F(lambda, mu) = sum_i coeffs[i] * lambda^i * mu^(degree - i)."""

    p: int
    degree: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("binary form needs degree + 1 coefficients")

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def dehomogenized(self) -> tuple:
        return ptrim(self.coeffs)


def factor_binary_form(form: BinaryFormFq) -> list[tuple[ClosedPoint, int]]:
    """Factor into closed points with multiplicities (sorted by point)."""
    if form.is_zero:
        raise ValueError("cannot factor the zero form")
    p = form.p
    f = form.dehomogenized()
    out = []
    inf_mult = form.degree - pdeg(f)
    if inf_mult:
        out.append((ClosedPoint.infinity(), inf_mult))
    f = monic(f, p)
    d = pdeg(f)
    e = 1
    while d > 0 and 2 * e <= d:
        for g in irreducibles_of_degree(e, p):
            mult = 0
            while True:
                quo, rem = pdivmod(f, g, p)
                if rem:
                    break
                f, mult = quo, mult + 1
            if mult:
                out.append((ClosedPoint.finite(g), mult))
        d = pdeg(f)
        e += 1
    if pdeg(f) > 0:
        out.append((ClosedPoint.finite(f), 1))
    return sorted(out)


def reconstruct_form(factors, p: int) -> BinaryFormFq:
    """Inverse of factor_binary_form, up to a nonzero scalar."""
    poly = (1,)
    degree = 0
    for pt, mult in factors:
        degree += pt.degree * mult
        if not pt.is_infinity:
            poly = pmul(poly, ppow(pt.poly, mult, p), p)
    coeffs = tuple(poly) + (0,) * (degree + 1 - len(poly))
    return BinaryFormFq(p, degree, coeffs)


def pencil_determinant(x1, x2, p: int) -> BinaryFormFq:
    """det(lambda*x1 + mu*x2) for square matrices, as a binary form."""
    n = len(x1)
    # entries are linear forms a*lambda + b*mu -> polynomial in t=lambda/mu of degree <= 1
    entries = [[ptrim((x2[i][j] % p, x1[i][j] % p)) for j in range(n)] for i in range(n)]
    memo = {}

    def minor(row: int, cols: frozenset):
        if row == n:
            return (1,)
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = ()
        sign_index = 0
        for c in range(n):
            if c in cols:
                continue
            e = entries[row][c]
            if e:
                sub = minor(row + 1, cols | {c})
                term = pmul(e, sub, p)
                acc = psub(acc, term, p) if sign_index % 2 else padd(acc, term, p)
            sign_index += 1
        memo[key] = acc
        return acc

    poly = minor(0, frozenset())
    coeffs = tuple(poly) + (0,) * (n + 1 - len(poly))
    return BinaryFormFq(p, n, coeffs)


def companion(poly, p: int) -> tuple:
    """Companion matrix of a monic polynomial: C e_j = e_{j+1}, last column -coeffs."""
    n = pdeg(poly)
    rows = [[0] * n for _ in range(n)]
    for j in range(n - 1):
        rows[j + 1][j] = 1
    for i in range(n):
        rows[i][n - 1] = (-poly[i]) % p
    return tuple(tuple(r) for r in rows)
