"""Partitions, dominance order and Kostka numbers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

MAX_PARTITION_WEIGHT = 20


def _check_partition(lam) -> tuple:
    lam = tuple(int(p) for p in lam if p)
    if any(p < 0 for p in lam) or any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"not a partition: {lam}")
    return lam


@lru_cache(maxsize=None)
def _partitions_lex(n: int, largest: int) -> tuple:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions_lex(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_of(n: int) -> list[tuple]:
    """All partitions of n, most dominant first.

    Reverse lexicographic order is a linear extension of dominance: if mu
    strictly dominates lam then mu comes first.
    """
    if n < 0 or n > MAX_PARTITION_WEIGHT:
        raise ValueError(f"partition weight must lie in [0, {MAX_PARTITION_WEIGHT}]")
    return list(_partitions_lex(n, n))


def partition_count_series(n: int) -> list[int]:
    """Coefficients of prod_i (1 - x^i)^-1 up to x^n, by series multiplication."""
    coeffs = [1] + [0] * n
    for i in range(1, n + 1):
        for k in range(i, n + 1):
            coeffs[k] += coeffs[k - i]
    return coeffs


def _partial_sums(lam, length):
    out, s = [], 0
    for i in range(length):
        s += lam[i] if i < len(lam) else 0
        out.append(s)
    return out


def dominance_leq(mu, lam) -> bool:
    """True iff lam dominates mu (every partial sum of mu is <= that of lam)."""
    mu, lam = _check_partition(mu), _check_partition(lam)
    if sum(mu) != sum(lam):
        raise ValueError("dominance compares partitions of the same weight")
    n = max(len(mu), len(lam))
    return all(a <= b for a, b in zip(_partial_sums(mu, n), _partial_sums(lam, n)))


def _ssyt(shape, content):
    """Yield SSYT of the given shape and content as tuples of rows.

    Entries 1..len(content) are placed value by value; value v fills a
    horizontal strip, so each stage is a partition contained in shape.
    """
    shape = tuple(shape)
    rows = len(shape)

    def strips(inner, count, row, acc):
        # distribute `count` boxes as a horizontal strip on top of `inner`
        if row == rows:
            if count == 0:
                yield tuple(acc)
            return
        upper = shape[row]
        if row > 0:
            upper = min(upper, inner[row - 1])
        for add in range(min(count, upper - inner[row]), -1, -1):
            acc.append(inner[row] + add)
            yield from strips(inner, count - add, row + 1, acc)
            acc.pop()

    def fill(stage, v, tableau):
        if v == len(content):
            if stage == shape:
                yield tuple(tuple(r) for r in tableau)
            return
        for nxt in strips(stage, content[v], 0, []):
            new = [list(r) for r in tableau]
            for i in range(rows):
                new[i].extend([v + 1] * (nxt[i] - stage[i]))
            yield from fill(nxt, v + 1, new)

    yield from fill(tuple(0 for _ in shape), 0, [[] for _ in shape])


def ssyt(shape, content) -> list:
    shape, content = _check_partition(shape), tuple(content)
    if sum(shape) != sum(content):
        raise ValueError("shape and content must have the same weight")
    return list(_ssyt(shape, content))


@lru_cache(maxsize=None)
def kostka(mu, lam) -> int:
    """Number of semistandard tableaux of shape mu and content lam."""
    mu, lam = _check_partition(mu), _check_partition(lam)
    if sum(mu) != sum(lam):
        raise ValueError("kostka needs partitions of the same weight")
    return sum(1 for _ in _ssyt(mu, lam))


@dataclass(frozen=True)
class KostkaMatrix:
    """K[i][j] = kostka(parts[i], parts[j]) with parts in partitions_of order."""
    n: int
    parts: tuple
    entries: tuple

    def index(self, lam) -> int:
        return self.parts.index(_check_partition(lam))

    def __getitem__(self, ij):
        mu, lam = ij
        return self.entries[self.index(mu)][self.index(lam)]

    def inverse(self) -> tuple:
        return _unitriangular_inverse(self.entries)

    def is_unitriangular(self) -> bool:
        m = len(self.parts)
        return all(self.entries[i][i] == 1 for i in range(m)) and all(
            self.entries[i][j] == 0 for i in range(m) for j in range(i))


def kostka_matrix(n: int) -> KostkaMatrix:
    if n > 8:
        raise ValueError("kostka_matrix is limited to n <= 8")
    parts = tuple(partitions_of(n))
    entries = tuple(tuple(kostka(mu, lam) for lam in parts) for mu in parts)
    return KostkaMatrix(n, parts, entries)


def _unitriangular_inverse(mat) -> tuple:
    """Exact inverse of an upper unitriangular matrix by back substitution."""
    m = len(mat)
    inv = [[Fraction(0)] * m for _ in range(m)]
    for j in range(m):
        inv[j][j] = Fraction(1)
        for i in range(j - 1, -1, -1):
            inv[i][j] = -sum((Fraction(mat[i][k]) * inv[k][j] for k in range(i + 1, j + 1)), Fraction(0))
    return tuple(tuple(r) for r in inv)


def matmul(a, b) -> tuple:
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0])))
                 for i in range(len(a)))


def standard_tableaux_count(shape) -> int:
    """Brute-force count of standard tableaux: remove corners recursively."""
    shape = _check_partition(shape)

    @lru_cache(maxsize=None)
    def count(sh):
        if not sh:
            return 1
        total = 0
        for i, row in enumerate(sh):
            below = sh[i + 1] if i + 1 < len(sh) else 0
            if row > below:
                smaller = tuple(p for p in sh[:i] + (row - 1,) + sh[i + 1:] if p)
                total += count(smaller)
        return total
    return count(shape)
