"""Class functions on Kronecker representation spaces and their twisted Hall structure.

Products are evaluated through untwisted Hall numbers

    F^Z_{X,Y} = #{W <= Z stable : W ~ Y, Z/W ~ X}

which are cached per (Z, dimension of W).  The twist exponent is applied after
the count, so the cache never depends on the convention in force.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from . import kronrep as kr
from .kronrep import IsoClass, MINUS, PLUS
from .qeps import QEps, eps_pow, qfactorial

QUOT_FIRST = "QuotFirst"
SUB_FIRST = "SubFirst"

# twist on tensor products used for the coproduct: the Euler-symmetric pairing
# of the inner grades, with a sign
TENSOR_RULES = ("x2y1", "-x2y1", "x1y2", "-x1y2")


def add_dims(a, b):
    return (a[0] + b[0], a[1] + b[1])


def sub_dims(a, b):
    return (a[0] - b[0], a[1] - b[1])


def symmetric_form(a, b) -> int:
    """(a, b) = <a, b> + <b, a> for the Kronecker Euler form."""
    return 2 * a[0] * b[0] + 2 * a[1] * b[1] - 2 * a[0] * b[1] - 2 * a[1] * b[0]


# ---------------------------------------------------------------------------
# conventions


@dataclass(frozen=True)
class TwistConvention:
    factor_order: str
    t: tuple  # 2x2
    u: tuple = ((0, 0), (0, 0))
    divided: int = 0  # theta^(k) = eps^(divided * k(k-1)/2) theta^k / [k]!
    tensor: str = "x2y1"

    def __post_init__(self):
        if self.factor_order not in (QUOT_FIRST, SUB_FIRST):
            raise ValueError(f"unknown factor order {self.factor_order!r}")
        if self.tensor not in TENSOR_RULES:
            raise ValueError(f"unknown tensor rule {self.tensor!r}")

    @staticmethod
    def _bilinear(m, b, c) -> int:
        return m[0][0] * b[0] * c[0] + m[0][1] * b[0] * c[1] + m[1][0] * b[1] * c[0] + m[1][1] * b[1] * c[1]

    def product_exponent(self, b, c, orientation=PLUS) -> int:
        if orientation == MINUS:
            b, c = (b[1], b[0]), (c[1], c[0])
        return self._bilinear(self.t, b, c)

    def coproduct_exponent(self, b, c, orientation=PLUS) -> int:
        if orientation == MINUS:
            b, c = (b[1], b[0]), (c[1], c[0])
        return self._bilinear(self.u, b, c)

    def tensor_exponent(self, x, y) -> int:
        """Exponent for (x1 (x) x2)(y1 (x) y2); x, y are pairs of grades."""
        sign = -1 if self.tensor.startswith("-") else 1
        if self.tensor.endswith("x2y1"):
            return sign * symmetric_form(x[1], y[0])
        return sign * symmetric_form(x[0], y[1])

    def divided_exponent(self, k: int) -> int:
        return self.divided * k * (k - 1) // 2

    def with_t(self, t) -> "TwistConvention":
        return TwistConvention(self.factor_order, tuple(map(tuple, t)), self.u, self.divided, self.tensor)

    def perturbed(self, i=0, j=1, delta=1) -> "TwistConvention":
        t = [list(r) for r in self.t]
        t[i][j] += delta
        return self.with_t(t)

    def to_json(self) -> dict:
        return {
            "factor_order": self.factor_order,
            "t": [list(r) for r in self.t],
            "u": [list(r) for r in self.u],
            "divided": self.divided,
            "tensor": self.tensor,
        }

    @classmethod
    def from_json(cls, obj) -> "TwistConvention":
        return cls(obj["factor_order"], tuple(map(tuple, obj["t"])), tuple(map(tuple, obj["u"])),
                   obj.get("divided", 0), obj.get("tensor", "x2y1"))

    @property
    def hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


# the convention singled out by calibration (see calibrate.py); kept here so
# that importing the algebra never triggers a search
DEFAULT_CONVENTION = TwistConvention(QUOT_FIRST, ((-1, -2), (0, -1)), ((1, -2), (0, 1)), 0, "x2y1")


# ---------------------------------------------------------------------------
# elements


class HallElem:
    """Finitely supported function on isomorphism classes with values in Q(eps)."""

    __slots__ = ("q", "orientation", "coeffs")

    def __init__(self, q: int, coeffs=None, orientation=PLUS):
        self.q = q
        self.orientation = orientation
        clean = {}
        for c, v in (coeffs or {}).items():
            if not isinstance(v, QEps):
                v = QEps(q, v)
            if v:
                if c.q != q or c.orientation != orientation:
                    raise ValueError(f"class {c!r} does not live over F_{q} ({orientation})")
                clean[c] = v
        self.coeffs = clean

    # constructors
    @classmethod
    def zero(cls, q, orientation=PLUS):
        return cls(q, {}, orientation)

    @classmethod
    def unit(cls, q, orientation=PLUS):
        return cls(q, {IsoClass(q, (0, 0), orientation=orientation): QEps(q, 1)}, orientation)

    @classmethod
    def indicator(cls, c: IsoClass, coeff=1):
        return cls(c.q, {c: coeff}, c.orientation)

    @classmethod
    def constant(cls, q, dims, coeff=1, orientation=PLUS, predicate=None):
        classes = kr.enumerate_classes(dims, q, orientation)
        return cls(q, {c: coeff for c in classes if predicate is None or predicate(c)}, orientation)

    # views
    def __getitem__(self, c):
        return self.coeffs.get(c, QEps(self.q))

    def coefficient(self, c) -> QEps:
        return self[c]

    def support(self):
        return sorted(self.coeffs, key=IsoClass.sort_key)

    def grades(self):
        return sorted({c.dims for c in self.coeffs})

    def component(self, dims) -> "HallElem":
        dims = tuple(dims)
        return HallElem(self.q, {c: v for c, v in self.coeffs.items() if c.dims == dims}, self.orientation)

    def by_grade(self) -> dict:
        out = defaultdict(dict)
        for c, v in self.coeffs.items():
            out[c.dims][c] = v
        return dict(out)

    def is_homogeneous(self) -> bool:
        return len(self.grades()) <= 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def restrict_regular(self) -> "HallElem":
        return HallElem(self.q, {c: v for c, v in self.coeffs.items() if c.is_regular}, self.orientation)

    def is_regular_supported(self) -> bool:
        return all(c.is_regular for c in self.coeffs)

    # arithmetic
    def _check(self, other):
        if not isinstance(other, HallElem):
            raise TypeError(f"expected HallElem, got {type(other).__name__}")
        if other.q != self.q:
            raise ValueError(f"q mismatch: {self.q} vs {other.q}")
        if other.orientation != self.orientation:
            raise ValueError("orientation mismatch")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for c, v in other.coeffs.items():
            out[c] = out[c] + v if c in out else v
        return HallElem(self.q, out, self.orientation)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return HallElem(self.q, {c: -v for c, v in self.coeffs.items()}, self.orientation)

    def scale(self, s) -> "HallElem":
        if not isinstance(s, QEps):
            s = QEps(self.q, s)
        return HallElem(self.q, {c: v * s for c, v in self.coeffs.items()}, self.orientation)

    def __rmul__(self, s):
        if isinstance(s, (int, QEps)) or hasattr(s, "denominator"):
            return self.scale(s)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, HallElem):
            return NotImplemented
        return self.q == other.q and self.orientation == other.orientation and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.q, self.orientation, frozenset(self.coeffs.items())))

    def ratio_to(self, other) -> QEps | None:
        """Scalar s with self == s * other, if one exists."""
        self._check(other)
        if set(self.coeffs) != set(other.coeffs):
            return None
        if not self.coeffs:
            return QEps(self.q, 1)
        ratio = None
        for c, v in self.coeffs.items():
            r = v / other.coeffs[c]
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
        return ratio

    def to_json(self) -> dict:
        terms = [{"class": c.to_json(), "coeff": self.coeffs[c].to_json()} for c in self.support()]
        return {"q": self.q, "orientation": self.orientation, "terms": terms}

    @classmethod
    def from_json(cls, obj) -> "HallElem":
        q = obj["q"]
        coeffs = {IsoClass.from_json(t["class"]): QEps.from_json(q, t["coeff"]) for t in obj["terms"]}
        return cls(q, coeffs, obj.get("orientation", PLUS))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{self.coeffs[c]!r}*{c!r}" for c in self.support())


# ---------------------------------------------------------------------------
# Hall numbers


_HALL_NUMBERS: dict = {}


def hall_numbers(z: IsoClass, subdims, store=None) -> dict:
    """{(quotient class, sub class): count} over stable subspaces of dimension subdims."""
    key = (z, tuple(subdims))
    hit = _HALL_NUMBERS.get(key)
    if hit is not None:
        return hit
    if store is not None:
        hit = store.get(z, tuple(subdims))
        if hit is not None:
            _HALL_NUMBERS[key] = hit
            return hit
    counts = Counter()
    x = kr.representative(z)
    classify = kr.classify_key
    for sub, quot in kr.stable_piece_keys(x, subdims):
        counts[(classify(quot), classify(sub))] += 1
    result = dict(counts)
    _HALL_NUMBERS[key] = result
    if store is not None:
        store.put(z, tuple(subdims), result)
    return result


def clear_hall_cache():
    _HALL_NUMBERS.clear()


# ---------------------------------------------------------------------------
# the algebra


class NotOnOpenSet(ValueError):
    pass


@dataclass
class HallAlgebra:
    q: int
    convention: TwistConvention = DEFAULT_CONVENTION
    store: object = field(default=None, repr=False)

    # element helpers
    def unit(self, orientation=PLUS) -> HallElem:
        return HallElem.unit(self.q, orientation)

    def zero(self, orientation=PLUS) -> HallElem:
        return HallElem.zero(self.q, orientation)

    def eps(self, k: int) -> QEps:
        return eps_pow(self.q, k)

    def theta(self, i: int, orientation=PLUS) -> HallElem:
        dims = (1, 0) if i == 0 else (0, 1)
        return HallElem.indicator(kr.enumerate_classes(dims, self.q, orientation)[0])

    def theta_divided(self, i: int, k: int, orientation=PLUS) -> HallElem:
        th = self.theta(i, orientation)
        power = self.power(th, k)
        s = self.eps(self.convention.divided_exponent(k)) / qfactorial(k, self.q)
        return power.scale(s)

    # product
    def _product_grade(self, fb: dict, gc: dict, b, c, orientation) -> dict:
        d = add_dims(b, c)
        quot_first = self.convention.factor_order == QUOT_FIRST
        subdims = c if quot_first else b
        twist = self.eps(self.convention.product_exponent(b, c, orientation))
        out = {}
        for z in kr.enumerate_classes(d, self.q, orientation):
            total = QEps(self.q)
            for (quot, sub), n in hall_numbers(z, subdims, self.store).items():
                if quot_first:
                    fv, gv = fb.get(quot), gc.get(sub)
                else:
                    fv, gv = fb.get(sub), gc.get(quot)
                if fv is None or gv is None:
                    continue
                total = total + fv * gv * n
            if total:
                out[z] = total * twist
        return out

    def product(self, f: HallElem, g: HallElem) -> HallElem:
        f._check(g)
        if f.q != self.q:
            raise ValueError(f"element over F_{f.q} used in algebra over F_{self.q}")
        out: dict = {}
        fg, gg = f.by_grade(), g.by_grade()
        for b, fb in fg.items():
            for c, gc in gg.items():
                for z, v in self._product_grade(fb, gc, b, c, f.orientation).items():
                    out[z] = out[z] + v if z in out else v
        return HallElem(self.q, out, f.orientation)

    def mul(self, *factors) -> HallElem:
        if not factors:
            return self.unit()
        out = factors[0]
        for h in factors[1:]:
            out = self.product(out, h)
        return out

    def power(self, f: HallElem, k: int) -> HallElem:
        out = self.unit(f.orientation)
        for _ in range(k):
            out = self.product(out, f)
        return out

    def commutator(self, f, g, s=None) -> HallElem:
        """f g - s g f (s defaults to 1)."""
        fg = self.product(f, g)
        gf = self.product(g, f)
        return fg - (gf if s is None else gf.scale(s))

    # coproduct
    def coproduct(self, f: HallElem, b=None, c=None) -> dict:
        """{(quotient class, sub class): coefficient}; restricted to one split when b, c given."""
        out: dict = {}
        for d, fd in f.by_grade().items():
            splits = [(tuple(b), tuple(c))] if b is not None else [
                ((b0, b1), (d[0] - b0, d[1] - b1)) for b0 in range(d[0] + 1) for b1 in range(d[1] + 1)]
            for bb, cc in splits:
                if add_dims(bb, cc) != d:
                    continue
                for key, v in self._coproduct_split(fd, bb, cc, f.orientation).items():
                    out[key] = out[key] + v if key in out else v
        return {k: v for k, v in out.items() if v}

    def _coproduct_split(self, fd: dict, b, c, orientation) -> dict:
        """Green's formula: sum over extensions of T (dims b) by W (dims c)."""
        q = self.q
        twist = self.eps(self.convention.coproduct_exponent(b, c, orientation))
        unip = q ** (b[0] * c[0] + b[1] * c[1])
        out: dict = {}
        for x, fx in fd.items():
            aut_x = kr.aut_order(x)
            for (y, z), n in hall_numbers(x, c, self.store).items():
                weight = fx * (n * kr.aut_order(y) * kr.aut_order(z) * unip)
                weight = weight / aut_x
                key = (y, z)
                out[key] = out[key] + weight if key in out else weight
        return {k: v * twist for k, v in out.items()}

    def tensor_product(self, left: dict, right: dict) -> dict:
        """Twisted product on functions of class pairs."""
        out: dict = {}
        for (y1, z1), a in left.items():
            for (y2, z2), b in right.items():
                e = self.convention.tensor_exponent((y1.dims, z1.dims), (y2.dims, z2.dims))
                left_part = self.product(HallElem.indicator(y1), HallElem.indicator(y2))
                right_part = self.product(HallElem.indicator(z1), HallElem.indicator(z2))
                s = a * b * self.eps(e)
                for y, vy in left_part.coeffs.items():
                    for z, vz in right_part.coeffs.items():
                        v = s * vy * vz
                        key = (y, z)
                        out[key] = out[key] + v if key in out else v
        return {k: v for k, v in out.items() if v}

    def tensor(self, f: HallElem, g: HallElem) -> dict:
        return {(y, z): a * b for y, a in f.coeffs.items() for z, b in g.coeffs.items()}

    # bilinear form
    def inner(self, f: HallElem, g: HallElem) -> QEps:
        f._check(g)
        q = self.q
        total = QEps(q)
        for c, v in f.coeffs.items():
            w = g.coeffs.get(c)
            if w is None:
                continue
            d0, d1 = c.dims
            total = total + v * w * QEps(q, q ** (d0 * d0 + d1 * d1)) / kr.aut_order(c)
        return total

    # reflection
    def sigma1(self, f: HallElem) -> HallElem:
        if f.orientation != MINUS:
            raise ValueError("sigma1 acts on functions over the Minus orientation")
        out = {}
        for c, v in f.coeffs.items():
            x = kr.representative(c)
            if not kr.satisfies_kernel_condition(x):
                raise NotOnOpenSet(f"{c!r} violates the kernel condition")
            y = kr.reflect_at_1(x)
            target = kr.classify(y)
            scale = self.eps(y.d1 * y.d1 - x.d1 * x.d1)
            out[target] = out.get(target, QEps(self.q)) + v * scale
        return HallElem(self.q, out, PLUS)

    def tau(self, f: HallElem) -> HallElem:
        """Transport along transpose_tau (class c -> dual class)."""
        return HallElem(self.q, {c.dual(): v for c, v in f.coeffs.items()},
                        MINUS if f.orientation == PLUS else PLUS)


def restrict_regular(f: HallElem) -> HallElem:
    return f.restrict_regular()
