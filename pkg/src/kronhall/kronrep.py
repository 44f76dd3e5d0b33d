"""Representations of the Kronecker quiver over F_q and their isomorphism classes.

A representation in ``Plus`` orientation is a pair of d1 x d0 matrices (maps
V0 -> V1).  ``Minus`` representations have their arrows reversed; they are
classified through their transpose, so an IsoClass label always refers to the
dimension vector of the representation itself (Preproj(k) has dimension
(k-1, k) in either orientation).
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from . import exactfield as ef
from .exactfield import ClosedPoint

PLUS = "+"
MINUS = "-"

# enumeration guard: d0 + d1 above this is refused
MAX_TOTAL_DIM = 10


class ClassificationError(RuntimeError):
    pass


class AmbiguousFingerprint(ClassificationError):
    pass


class KernelConditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class KronRep:
    p: int
    d0: int
    d1: int
    x1: tuple
    x2: tuple
    orientation: str = PLUS

    def __post_init__(self):
        rows, cols = (self.d1, self.d0) if self.orientation == PLUS else (self.d0, self.d1)
        for m in (self.x1, self.x2):
            if len(m) != rows or any(len(r) != cols for r in m):
                raise ValueError(f"matrix shape must be {rows}x{cols} for dims {self.dims} ({self.orientation})")

    @classmethod
    def make(cls, p, dims, x1, x2, orientation=PLUS) -> "KronRep":
        norm = lambda m: tuple(tuple(int(v) % p for v in r) for r in m)
        d0, d1 = dims
        rows = d1 if orientation == PLUS else d0
        x1 = norm(x1) if rows else ()
        x2 = norm(x2) if rows else ()
        return cls(ef.check_prime(p), d0, d1, x1, x2, orientation)

    @property
    def dims(self) -> tuple:
        return (self.d0, self.d1)

    @property
    def key(self) -> tuple:
        return (self.p, self.orientation, self.d0, self.d1, self.x1, self.x2)

    def transposed_plus(self) -> "KronRep":
        """For a Minus rep: the Plus rep with transposed matrices (same dims)."""
        if self.orientation == PLUS:
            return self
        t1 = _transpose_mat(self.x1, self.d0, self.d1)
        t2 = _transpose_mat(self.x2, self.d0, self.d1)
        return KronRep(self.p, self.d0, self.d1, t1, t2, PLUS)


def direct_sum(reps, p: int, orientation=PLUS) -> KronRep:
    d0 = sum(r.d0 for r in reps)
    d1 = sum(r.d1 for r in reps)
    rows, cols = (d1, d0) if orientation == PLUS else (d0, d1)
    m1 = [[0] * cols for _ in range(rows)]
    m2 = [[0] * cols for _ in range(rows)]
    ro = co = 0
    for r in reps:
        rr, cc = (r.d1, r.d0) if orientation == PLUS else (r.d0, r.d1)
        for i in range(rr):
            for j in range(cc):
                m1[ro + i][co + j] = r.x1[i][j]
                m2[ro + i][co + j] = r.x2[i][j]
        ro += rr
        co += cc
    return KronRep(p, d0, d1, tuple(map(tuple, m1)), tuple(map(tuple, m2)), orientation)


# ---------------------------------------------------------------------------
# labels and classes


@dataclass(frozen=True, order=True)
class IndecompLabel:
    """Preproj(k) = P_k, Preinj(k) = I_k, or Regular(point, m) = R_{point, m}."""

    kind: str  # "P", "I" or "R"
    k: int = 0
    point: ClosedPoint | None = None
    m: int = 0

    @classmethod
    def preproj(cls, k):
        return cls("P", k)

    @classmethod
    def preinj(cls, k):
        return cls("I", k)

    @classmethod
    def regular(cls, point, m):
        return cls("R", 0, point, m)

    @property
    def dims(self) -> tuple:
        if self.kind == "P":
            return (self.k - 1, self.k)
        if self.kind == "I":
            return (self.k, self.k - 1)
        n = self.point.degree * self.m
        return (n, n)

    @property
    def endo_degree(self) -> int:
        """Degree over F_q of the residue field of End."""
        return self.point.degree if self.kind == "R" else 1

    def dual(self) -> "IndecompLabel":
        if self.kind == "P":
            return IndecompLabel.preinj(self.k)
        if self.kind == "I":
            return IndecompLabel.preproj(self.k)
        return self

    def __repr__(self):
        if self.kind == "R":
            return f"R[{self.point!r},{self.m}]"
        return f"{self.kind}{self.k}"


@dataclass(frozen=True)
class IsoClass:
    q: int
    dims: tuple
    preproj: tuple = ()  # ((k, mult), ...) sorted by k
    preinj: tuple = ()
    regular: tuple = ()  # ((ClosedPoint, partition), ...) sorted by point
    orientation: str = PLUS
    _hash: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.q, self.dims, self.preproj, self.preinj,
                                                 self.regular, self.orientation)))

    def __hash__(self):
        return self._hash

    @classmethod
    def from_labels(cls, q, labels, orientation=PLUS) -> "IsoClass":
        labels = list(labels)
        d0 = sum(l.dims[0] for l in labels)
        d1 = sum(l.dims[1] for l in labels)
        pre = Counter(l.k for l in labels if l.kind == "P")
        inj = Counter(l.k for l in labels if l.kind == "I")
        reg: dict = {}
        for l in labels:
            if l.kind == "R":
                reg.setdefault(l.point, []).append(l.m)
        regular = tuple(sorted((pt, tuple(sorted(ms, reverse=True))) for pt, ms in reg.items()))
        return cls(q, (d0, d1), tuple(sorted(pre.items())), tuple(sorted(inj.items())), regular, orientation)

    def labels(self) -> list[IndecompLabel]:
        out = []
        for k, mult in self.preproj:
            out += [IndecompLabel.preproj(k)] * mult
        for k, mult in self.preinj:
            out += [IndecompLabel.preinj(k)] * mult
        for pt, part in self.regular:
            out += [IndecompLabel.regular(pt, m) for m in part]
        return out

    def summands(self) -> list[tuple[IndecompLabel, int]]:
        """Distinct indecomposable summands with multiplicities."""
        return sorted(Counter(self.labels()).items())

    @property
    def is_regular(self) -> bool:
        return not self.preproj and not self.preinj

    @property
    def has_preproj(self) -> bool:
        return bool(self.preproj)

    @property
    def has_preinj(self) -> bool:
        return bool(self.preinj)

    def dual(self) -> "IsoClass":
        """Class of the transpose in the opposite orientation (P_k <-> I_k)."""
        other = MINUS if self.orientation == PLUS else PLUS
        return IsoClass.from_labels(self.q, [l.dual() for l in self.labels()], other)

    def regular_type(self) -> tuple:
        """Field-independent shape: (P mults, I mults, sorted (degree, partition) list)."""
        return (self.preproj, self.preinj,
                tuple(sorted((pt.degree, part) for pt, part in self.regular)))

    def sort_key(self):
        return (self.dims, self.preproj, self.preinj,
                tuple((pt.sort_key, part) for pt, part in self.regular))

    def to_json(self) -> dict:
        out = {
            "q": self.q,
            "preproj": [[k, m] for k, m in self.preproj],
            "preinj": [[k, m] for k, m in self.preinj],
            "regular": [{"point": pt.to_json(), "partition": list(part)} for pt, part in self.regular],
        }
        if self.orientation == MINUS:
            out["orientation"] = MINUS
        return out

    @classmethod
    def from_json(cls, obj) -> "IsoClass":
        q = obj["q"]
        labels = [IndecompLabel.preproj(k) for k, m in obj.get("preproj", []) for _ in range(m)]
        labels += [IndecompLabel.preinj(k) for k, m in obj.get("preinj", []) for _ in range(m)]
        for entry in obj.get("regular", []):
            pt = ClosedPoint.from_json(entry["point"])
            labels += [IndecompLabel.regular(pt, m) for m in entry["partition"]]
        return cls.from_labels(q, labels, obj.get("orientation", PLUS))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        body = " + ".join(repr(l) for l in self.labels()) or "0"
        o = "" if self.orientation == PLUS else "-"
        return f"<{o}{body} @{self.dims}>"


# ---------------------------------------------------------------------------
# closed points


def rational_points(q: int) -> list[ClosedPoint]:
    pts = [ClosedPoint.infinity()]
    pts += [ClosedPoint.finite(((-a) % q, 1)) for a in range(q)]
    return pts


@lru_cache(maxsize=None)
def closed_points_up_to(deg: int, q: int) -> tuple:
    pts = rational_points(q)
    for e in range(2, deg + 1):
        pts += [ClosedPoint.finite(f) for f in ef.irreducibles_of_degree(e, q)]
    return tuple(sorted(pts))


# ---------------------------------------------------------------------------
# representatives


@lru_cache(maxsize=None)
def indecomposable_rep(label: IndecompLabel, p: int) -> KronRep:
    if label.kind == "P":
        k = label.k
        x1 = tuple(tuple(1 if i == j else 0 for j in range(k - 1)) for i in range(k))
        x2 = tuple(tuple(1 if i == j + 1 else 0 for j in range(k - 1)) for i in range(k))
        return KronRep(p, k - 1, k, x1, x2)
    if label.kind == "I":
        k = label.k
        x1 = tuple(tuple(1 if j == i else 0 for j in range(k)) for i in range(k - 1))
        x2 = tuple(tuple(1 if j == i + 1 else 0 for j in range(k)) for i in range(k - 1))
        return KronRep(p, k, k - 1, x1, x2)
    n = label.point.degree * label.m
    if label.point.is_infinity:
        jordan = tuple(tuple(1 if i == j + 1 else 0 for j in range(n)) for i in range(n))
        return KronRep(p, n, n, jordan, ef.identity(n))
    # x1 = I, x2 = -C so that lambda*x1 + mu*x2 is singular at the roots of the point
    comp = ef.companion(ef.ppow(label.point.poly, label.m, p), p)
    neg = tuple(tuple((-v) % p for v in r) for r in comp)
    return KronRep(p, n, n, ef.identity(n), neg)


def representative(c: IsoClass) -> KronRep:
    return _representative(c)


@lru_cache(maxsize=None)
def _representative(c: IsoClass) -> KronRep:
    plus = direct_sum([indecomposable_rep(l, c.q) for l in c.labels()], c.q)
    if c.orientation == PLUS:
        return plus
    t1 = _transpose_mat(plus.x1, plus.d1, plus.d0)
    t2 = _transpose_mat(plus.x2, plus.d1, plus.d0)
    return KronRep(c.q, c.dims[0], c.dims[1], t1, t2, MINUS)


# ---------------------------------------------------------------------------
# Hom spaces


def hom_dim(a: KronRep, b: KronRep) -> int:
    """dim Hom(a, b) by solving the intertwiner system."""
    if a.p != b.p:
        raise ef.FieldMismatch(f"F_{a.p} vs F_{b.p}")
    if a.orientation != b.orientation:
        raise ValueError("orientation mismatch")
    if a.orientation == MINUS:
        return hom_dim(b.transposed_plus(), a.transposed_plus())
    return _hom_dim_plus(a.key, b.key)


@lru_cache(maxsize=1 << 16)
def _hom_dim_plus(akey, bkey) -> int:
    p, _, a0, a1, ax1, ax2 = akey
    _, _, b0, b1, bx1, bx2 = bkey
    nf0 = b0 * a0
    nvars = nf0 + b1 * a1
    if nvars == 0:
        return 0
    rows = []
    for xa, xb in ((ax1, bx1), (ax2, bx2)):
        for r in range(b1):
            for c in range(a0):
                eq = [0] * nvars
                for k in range(a1):
                    v = xa[k][c]
                    if v:
                        eq[nf0 + r * a1 + k] += v
                for k in range(b0):
                    v = xb[r][k]
                    if v:
                        eq[k * a0 + c] -= v
                if any(eq):
                    rows.append([e % p for e in eq])
    return nvars - ef.rank(rows, p)


def euler_form(a, b) -> int:
    return a[0] * b[0] + a[1] * b[1] - 2 * a[0] * b[1]


def ext_dim(a: KronRep, b: KronRep) -> int:
    return hom_dim(a, b) - euler_form(a.dims, b.dims)


@lru_cache(maxsize=None)
def _label_hom(a: IndecompLabel, b: IndecompLabel, p: int) -> int:
    return hom_dim(indecomposable_rep(a, p), indecomposable_rep(b, p))


def end_dim(c: IsoClass) -> int:
    s = c.summands()
    return sum(ma * mb * _label_hom(la, lb, c.q) for la, ma in s for lb, mb in s)


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


@lru_cache(maxsize=None)
def aut_order(c: IsoClass) -> int:
    """|Aut(M)| = q^(dim rad End) * prod |GL_m(F_{q^e})| over distinct summands."""
    q = c.q
    semisimple = 0
    out = 1
    for label, mult in c.summands():
        e = label.endo_degree
        semisimple += mult * mult * e
        out *= gl_order(mult, q ** e)
    return out * q ** (end_dim(c) - semisimple)


def group_order(dims, q: int) -> int:
    return gl_order(dims[0], q) * gl_order(dims[1], q)


def orbit_size(c: IsoClass) -> int:
    return group_order(c.dims, c.q) // aut_order(c)


# ---------------------------------------------------------------------------
# classification


def is_regular(x: KronRep) -> bool:
    if x.d0 != x.d1:
        return False
    if x.d0 == 0:
        return True
    return not ef.pencil_determinant(x.x1, x.x2, x.p).is_zero


def _poly_kernel_dims(x1, x2, d0, d1, p, upto):
    """dim of {v(t) of degree <= j : (x1 + t x2) v(t) = 0} for j = 0..upto."""
    out = []
    for j in range(upto + 1):
        ncols = (j + 1) * d0
        nrows = (j + 2) * d1
        if ncols == 0:
            out.append(0)
            continue
        rows = [[0] * ncols for _ in range(nrows)]
        for blk in range(j + 1):
            for r in range(d1):
                row_a = rows[blk * d1 + r]
                row_b = rows[(blk + 1) * d1 + r]
                for c in range(d0):
                    row_a[blk * d0 + c] = x1[r][c]
                    row_b[blk * d0 + c] = x2[r][c]
        out.append(ncols - ef.rank(rows, p))
    return out


def _minimal_index_counts(x1, x2, d0, d1, p) -> Counter:
    """Multiplicities of the column minimal indices of the pencil x1 + t*x2."""
    if d0 == 0:
        return Counter()
    ks = _poly_kernel_dims(x1, x2, d0, d1, p, d0 - 1)
    ks = [0, 0] + ks
    counts = Counter()
    for eps in range(d0):
        n = ks[eps + 2] - 2 * ks[eps + 1] + ks[eps]
        if n:
            counts[eps] = n
    return counts


def _regular_partition(x: KronRep, label_of, n_inj: int, e: int, first: int) -> tuple:
    """Partition at one point from successive Hom dimensions out of R_{pt, m}."""
    counts = [first]
    prev = e * (n_inj + first)
    m = 1
    while counts[-1] > 0:
        m += 1
        h = hom_dim(indecomposable_rep(label_of(m), x.p), x)
        step = (h - prev) // e - n_inj
        prev = h
        counts.append(step)
    # counts[i] = number of parts >= i + 1
    parts = []
    for i in range(len(counts) - 1):
        parts += [i + 1] * (counts[i] - counts[i + 1])
    return tuple(sorted(parts, reverse=True))


def classify(x: KronRep) -> IsoClass:
    """Isomorphism class of a representation."""
    return classify_key(x.key)


@lru_cache(maxsize=1 << 20)
def _classify_plus(key) -> IsoClass:
    p, _, d0, d1, x1, x2 = key
    x = KronRep(p, d0, d1, x1, x2)
    inj = _minimal_index_counts(x1, x2, d0, d1, p)
    t1 = ef.transpose(x1, d0) if d1 else tuple(() for _ in range(d0))
    t2 = ef.transpose(x2, d0) if d1 else tuple(() for _ in range(d0))
    if not d1:
        t1 = t2 = tuple(() for _ in range(d0))
    pre = _minimal_index_counts(t1, t2, d1, d0, p)
    labels = [IndecompLabel.preinj(eps + 1) for eps, n in inj.items() for _ in range(n)]
    labels += [IndecompLabel.preproj(eta + 1) for eta, n in pre.items() for _ in range(n)]
    r0 = d0 - sum(l.dims[0] for l in labels)
    r1 = d1 - sum(l.dims[1] for l in labels)
    if r0 != r1 or r0 < 0:
        raise ClassificationError(f"inconsistent minimal indices for {key}")
    remaining = r0
    n_inj = sum(inj.values())
    if remaining:
        if not labels:
            labels += _regular_labels_square(x)
        else:
            labels += _regular_labels_mixed(x, n_inj, remaining)
        got = sum(l.dims[0] for l in labels)
        if got != d0:
            raise ClassificationError(f"regular part not fully accounted for in {key}")
    return IsoClass.from_labels(p, labels)


def _regular_labels_square(x: KronRep) -> list:
    p = x.p
    form = ef.pencil_determinant(x.x1, x.x2, p)
    labels = []
    for pt, mult in ef.factor_binary_form(form):
        e = pt.degree
        size = mult  # total partition size at pt
        if size == 1:
            labels.append(IndecompLabel.regular(pt, 1))
            continue
        h1 = hom_dim(indecomposable_rep(IndecompLabel.regular(pt, 1), p), x)
        first = h1 // e
        if first == size:
            labels += [IndecompLabel.regular(pt, 1)] * size
            continue
        if first == 1:
            labels.append(IndecompLabel.regular(pt, size))
            continue
        part = _regular_partition(x, lambda m, pt=pt: IndecompLabel.regular(pt, m), 0, e, first)
        labels += [IndecompLabel.regular(pt, m) for m in part]
    return labels


def _regular_labels_mixed(x: KronRep, n_inj: int, remaining: int) -> list:
    p = x.p
    labels = []
    generic_rank = x.d0 - n_inj
    for pt in rational_points(p):
        if remaining == 0:
            return labels
        if pt.is_infinity:
            mat = x.x1
        else:
            a = (-pt.poly[0]) % p
            mat = tuple(tuple((a * u + v) % p for u, v in zip(r1, r2)) for r1, r2 in zip(x.x1, x.x2))
        first = generic_rank - ef.rank(mat, p)
        if first <= 0:
            continue
        part = _regular_partition(x, lambda m, pt=pt: IndecompLabel.regular(pt, m), n_inj, 1, first)
        labels += [IndecompLabel.regular(pt, m) for m in part]
        remaining -= sum(part)
    e = 2
    while remaining > 0:
        if e > remaining:
            raise ClassificationError("regular part not found")
        for poly in ef.irreducibles_of_degree(e, p):
            if remaining == 0:
                break
            pt = ClosedPoint.finite(poly)
            h1 = hom_dim(indecomposable_rep(IndecompLabel.regular(pt, 1), p), x)
            first = h1 // e - n_inj
            if first <= 0:
                continue
            part = _regular_partition(x, lambda m, pt=pt: IndecompLabel.regular(pt, m), n_inj, e, first)
            labels += [IndecompLabel.regular(pt, m) for m in part]
            remaining -= e * sum(part)
        e += 1
    return labels


def indecomposables_up_to(dims, q: int) -> list[IndecompLabel]:
    """All indecomposable labels whose dimension vector is <= dims."""
    d0, d1 = dims
    out = [IndecompLabel.preproj(k) for k in range(1, d1 + 1) if k - 1 <= d0]
    out += [IndecompLabel.preinj(k) for k in range(1, d0 + 1) if k - 1 <= d1]
    n = min(d0, d1)
    for pt in closed_points_up_to(n, q) if n else ():
        for m in range(1, n // pt.degree + 1):
            out.append(IndecompLabel.regular(pt, m))
    return out


def fingerprint(x: KronRep, dims=None) -> tuple:
    """Hom dimensions from every indecomposable of dimension <= dims into x."""
    dims = x.dims if dims is None else dims
    if x.orientation == MINUS:
        x = x.transposed_plus()
    return tuple(hom_dim(indecomposable_rep(l, x.p), x) for l in indecomposables_up_to(dims, x.p))


# ---------------------------------------------------------------------------
# enumeration


def _partitions(n, largest=None):
    if n == 0:
        yield ()
        return
    largest = n if largest is None else largest
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def _regular_parts(total: int, points: list, start: int = 0):
    """Assignments point -> nonempty partition with sum deg*|partition| == total."""
    if total == 0:
        yield ()
        return
    for i in range(start, len(points)):
        pt = points[i]
        e = pt.degree
        for size in range(1, total // e + 1):
            for part in _partitions(size):
                for rest in _regular_parts(total - e * size, points, i + 1):
                    yield ((pt, part),) + rest


def _multisets(items, budget, start=0):
    """Multisets (as (item, mult) tuples) of items with dims summing to <= budget."""
    yield ()
    for i in range(start, len(items)):
        k, dims = items[i]
        mult = 1
        while dims[0] * mult <= budget[0] and dims[1] * mult <= budget[1]:
            rem = (budget[0] - dims[0] * mult, budget[1] - dims[1] * mult)
            for rest in _multisets(items, rem, i + 1):
                yield ((k, mult),) + rest
            mult += 1


def enumerate_classes(d, q: int, orientation=PLUS, max_total: int = MAX_TOTAL_DIM) -> list[IsoClass]:
    """All isomorphism classes of representations of dimension d over F_q."""
    d = tuple(d)
    if d[0] + d[1] > max_total:
        raise ValueError(f"dimension {d} exceeds the enumeration bound {max_total}")
    return list(_enumerate_classes(d, q, orientation))


@lru_cache(maxsize=None)
def _enumerate_classes(d, q, orientation):
    ef.check_prime(q)
    d0, d1 = d
    pre_items = [(k, (k - 1, k)) for k in range(1, d1 + 1) if k - 1 <= d0]
    inj_items = [(k, (k, k - 1)) for k in range(1, d0 + 1) if k - 1 <= d1]
    out = []
    for pre in _multisets(pre_items, d):
        used = (sum((k - 1) * m for k, m in pre), sum(k * m for k, m in pre))
        rem = (d0 - used[0], d1 - used[1])
        for inj in _multisets(inj_items, rem):
            used2 = (sum(k * m for k, m in inj), sum((k - 1) * m for k, m in inj))
            r0, r1 = rem[0] - used2[0], rem[1] - used2[1]
            if r0 != r1 or r0 < 0:
                continue
            points = list(closed_points_up_to(r0, q)) if r0 else []
            for reg in _regular_parts(r0, points):
                out.append(IsoClass(q, d, tuple(sorted(pre)), tuple(sorted(inj)),
                                    tuple(sorted(reg)), orientation))
    out.sort(key=IsoClass.sort_key)
    return tuple(out)


@dataclass(frozen=True)
class CBIndex:
    preproj: tuple  # (r_1, r_2, ...) multiplicities of P_i
    preinj: tuple  # (s_1, s_2, ...) multiplicities of I_i
    partition: tuple

    @property
    def dims(self) -> tuple:
        d0 = sum(r * (i - 1) for i, r in enumerate(self.preproj, 1))
        d1 = sum(r * i for i, r in enumerate(self.preproj, 1))
        d0 += sum(s * i for i, s in enumerate(self.preinj, 1))
        d1 += sum(s * (i - 1) for i, s in enumerate(self.preinj, 1))
        n = sum(self.partition)
        return (d0 + n, d1 + n)


def enumerate_cb_index(d, q: int | None = None) -> list[CBIndex]:
    """Triples ((r_i), (s_i), lambda) of total dimension d."""
    d = tuple(d)
    d0, d1 = d
    out = []
    pre_items = [(k, (k - 1, k)) for k in range(1, d1 + 1) if k - 1 <= d0]
    inj_items = [(k, (k, k - 1)) for k in range(1, d0 + 1) if k - 1 <= d1]
    for pre in _multisets(pre_items, d):
        used = (sum((k - 1) * m for k, m in pre), sum(k * m for k, m in pre))
        rem = (d0 - used[0], d1 - used[1])
        for inj in _multisets(inj_items, rem):
            used2 = (sum(k * m for k, m in inj), sum((k - 1) * m for k, m in inj))
            r0, r1 = rem[0] - used2[0], rem[1] - used2[1]
            if r0 != r1 or r0 < 0:
                continue
            rv = _mult_vector(pre)
            sv = _mult_vector(inj)
            for lam in _partitions(r0):
                out.append(CBIndex(rv, sv, lam))
    return out


def _mult_vector(pairs):
    if not pairs:
        return ()
    top = max(k for k, _ in pairs)
    vec = [0] * top
    for k, m in pairs:
        vec[k - 1] = m
    return tuple(vec)


# ---------------------------------------------------------------------------
# subrepresentations


def _transpose_mat(m, rows, cols):
    """Transpose of a rows x cols matrix given as nested tuples (handles empty shapes)."""
    return tuple(tuple(m[r][c] for r in range(rows)) for c in range(cols))


def classify_key(key) -> IsoClass:
    """classify() on a raw (p, orientation, d0, d1, x1, x2) key."""
    p, o, d0, d1, x1, x2 = key
    if o == PLUS:
        return _classify_plus(key)
    return _classify_minus(key)


@lru_cache(maxsize=1 << 20)
def _classify_minus(key) -> IsoClass:
    p, _, d0, d1, x1, x2 = key
    plus = (p, PLUS, d0, d1, _transpose_mat(x1, d0, d1), _transpose_mat(x2, d0, d1))
    c = _classify_plus(plus)
    return IsoClass(c.q, c.dims, c.preproj, c.preinj, c.regular, MINUS)


def _supersets(u_basis, u_piv, n, target, p):
    """All subspaces W of F_p^n with U <= W and dim W == target, as RREF (basis, pivots)."""
    k = target - len(u_basis)
    if k < 0:
        return
    if k == 0:
        yield u_basis, u_piv
        return
    upiv = set(u_piv)
    free = [c for c in range(n) if c not in upiv]
    for basis, piv in ef.subspace_bases(len(free), k, p):
        # new rows vanish on the pivots of U and are reduced among themselves;
        # clearing their pivot columns from the rows of U gives the joint RREF
        new_rows = []
        new_piv = []
        for row, pc in zip(basis, piv):
            v = [0] * n
            for coord, c in zip(row, free):
                v[c] = coord
            new_rows.append(v)
            new_piv.append(free[pc])
        old_rows = []
        for row in u_basis:
            r = list(row)
            for nr, npc in zip(new_rows, new_piv):
                f = r[npc]
                if f:
                    r = [(a - f * b) % p for a, b in zip(r, nr)]
            old_rows.append(r)
        merged = sorted(zip(list(u_piv) + new_piv, old_rows + new_rows))
        yield tuple(tuple(r) for _, r in merged), tuple(pc for pc, _ in merged)


def stable_piece_keys(x: KronRep, b):
    """Yield (sub key, quotient key) for every stable graded subspace of dimension b."""
    for _, _, sk, qk in stable_pieces(x, b):
        yield sk, qk


def stable_pieces(x: KronRep, b):
    """Like stable_piece_keys, also yielding the RREF bases of the source and target parts of W.

    For Plus orientation the source part is W0, for Minus it is W1.
    """
    b0, b1 = b
    if b0 > x.d0 or b1 > x.d1 or b0 < 0 or b1 < 0:
        return
    p, o = x.p, x.orientation
    if o == PLUS:
        src_n, tgt_n, bs, bt = x.d0, x.d1, b0, b1
    else:
        src_n, tgt_n, bs, bt = x.d1, x.d0, b1, b0
    mats = (x.x1, x.x2)
    # columns of each map, i.e. images of the unit vectors
    cols = [_transpose_mat(m, tgt_n, src_n) for m in mats]
    qd0, qd1 = x.d0 - b0, x.d1 - b1
    for s_basis, s_piv in ef.subspace_bases(src_n, bs, p):
        imgs = []
        for cm in cols:
            per = []
            for v in s_basis:
                acc = [0] * tgt_n
                for coeff, col in zip(v, cm):
                    if coeff:
                        acc = [(a + coeff * c) for a, c in zip(acc, col)]
                per.append([a % p for a in acc])
            imgs.append(per)
        allimg = [v for per in imgs for v in per if any(v)]
        u_basis, u_piv = ef.rref(allimg, p, tgt_n) if allimg else ((), ())
        if len(u_basis) > bt:
            continue
        spiv = set(s_piv)
        s_free = [c for c in range(src_n) if c not in spiv]
        free_cols = [[cm[c] for c in s_free] for cm in cols]
        for t_basis, t_piv in _supersets(u_basis, u_piv, tgt_n, bt, p):
            tpiv = set(t_piv)
            t_free = [c for c in range(tgt_n) if c not in tpiv]
            sub_m = tuple(tuple(tuple(per[j][pc] for j in range(bs)) for pc in t_piv) for per in imgs)
            quot_m = []
            for fc in free_cols:
                reduced = []
                for col in fc:
                    v = list(col)
                    for row, pc in zip(t_basis, t_piv):
                        f = v[pc]
                        if f:
                            v = [(a - f * r) % p for a, r in zip(v, row)]
                    reduced.append(v)
                quot_m.append(tuple(tuple(v[t] for v in reduced) for t in t_free))
            yield (s_basis, t_basis, (p, o, b0, b1, sub_m[0], sub_m[1]),
                   (p, o, qd0, qd1, quot_m[0], quot_m[1]))


def iter_stable_subspaces(x: KronRep, b):
    """Yield (sub, quot) for every x-stable graded subspace of dimension b.

    The sub representation is written in the echelon basis of W and the
    quotient in the unit vectors off the pivot columns.
    """
    for sk, qk in stable_piece_keys(x, b):
        yield _from_key(sk), _from_key(qk)


def _from_key(key) -> KronRep:
    p, o, d0, d1, x1, x2 = key
    return KronRep(p, d0, d1, x1, x2, o)


def stable_subspaces(x: KronRep, b) -> list[tuple[KronRep, KronRep]]:
    return list(iter_stable_subspaces(x, b))


# ---------------------------------------------------------------------------
# reflection and transpose


def satisfies_kernel_condition(x: KronRep) -> bool:
    """ker x1 and ker x2 meet trivially (Minus orientation)."""
    if x.orientation != MINUS:
        raise ValueError("kernel condition is stated for Minus representations")
    stacked = tuple(x.x1) + tuple(x.x2)
    return ef.rank(stacked, x.p) == x.d1 if x.d1 else True


def spans_target(x: KronRep) -> bool:
    """x1(V0) + x2(V0) = V1 (Plus orientation)."""
    if x.orientation != PLUS:
        raise ValueError("spanning condition is stated for Plus representations")
    if not x.d1:
        return True
    block = tuple(r1 + r2 for r1, r2 in zip(x.x1, x.x2))
    return ef.rank(block, x.p) == x.d1


def reflect_at_1(x: KronRep) -> KronRep:
    """Reflection at vertex 1: Minus rep with ker x1 & ker x2 = 0 -> Plus rep of dims (d0, 2d0 - d1)."""
    if x.orientation != MINUS:
        raise ValueError("reflect_at_1 expects a Minus representation")
    if not satisfies_kernel_condition(x):
        raise KernelConditionError("ker(x1) and ker(x2) intersect nontrivially")
    p, d0, d1 = x.p, x.d0, x.d1
    n = 2 * d0
    # columns of the stacked (2 d0) x d1 matrix span the image of V1 in V0 + V0
    stacked = tuple(tuple(r) for r in tuple(x.x1) + tuple(x.x2)) if d1 else tuple(() for _ in range(n))
    coker = ef.left_kernel(stacked, p, n) if d1 else ef.identity(n)
    coker = ef.rref(coker, p, n)[0] if coker else ()
    e1 = len(coker)
    y1 = tuple(tuple(row[:d0]) for row in coker)
    y2 = tuple(tuple(row[d0:]) for row in coker)
    return KronRep(p, d0, e1, y1, y2, PLUS)


def reflection_sequence_exact(x: KronRep, y: KronRep) -> bool:
    """Check 0 -> V1 -> V0 + V0 -> V1' -> 0 is exact for x (Minus) and y = reflect_at_1(x)."""
    p = x.p
    d0 = x.d0
    if x.d1:
        stacked = tuple(tuple(r) for r in tuple(x.x1) + tuple(x.x2))
        inj = ef.rank(stacked, p) == x.d1
    else:
        stacked = ()
        inj = True
    if y.d1:
        big = tuple(r1 + r2 for r1, r2 in zip(y.x1, y.x2))
        surj = ef.rank(big, p) == y.d1
        comp_zero = True
        if x.d1:
            prod = ef.matmul(big, stacked, p, 2 * d0, x.d1)
            comp_zero = not any(any(r) for r in prod)
    else:
        surj = True
        comp_zero = True
    middle = inj and surj and comp_zero and (2 * d0 == x.d1 + y.d1)
    return middle


def transpose_tau(x: KronRep) -> KronRep:
    """Swap the graded pieces and the orientation, keeping the matrices."""
    other = MINUS if x.orientation == PLUS else PLUS
    return KronRep(x.p, x.d1, x.d0, x.x1, x.x2, other)
