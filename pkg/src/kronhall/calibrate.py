"""Exhaustive search for the twist convention.

Every anchor is a linear combination of words in a few homogeneous atoms.  A
word's twisted value is eps**(sum t(prefix grade, next grade)) times its
untwisted value, so the untwisted words are computed once per factor order and
each candidate only costs a handful of scalings.
"""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import kronrep as kr
from .hall import (HallAlgebra, HallElem, QUOT_FIRST, SUB_FIRST, TENSOR_RULES, TwistConvention,
                   add_dims)
from .kronrep import IndecompLabel, IsoClass
from .qeps import QEps, eps_pow, qfactorial, qint

log = logging.getLogger(__name__)

TWIST_RANGE = range(-3, 4)
DIVIDED_RANGE = range(-4, 5)
DEFAULT_ANCHORS = ("A3", "A2", "A1", "A4")
A3_SCALARS = {"q": 2, "q^-1": -2, "1": 0}  # eps-exponents; q = eps^2 so eps^{+-2} coincide


class NoConventionFound(RuntimeError):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class MultipleConventions(RuntimeError):
    def __init__(self, conventions):
        super().__init__(f"{len(conventions)} conventions survive")
        self.conventions = conventions


# ---------------------------------------------------------------------------
# atoms and words


def _atoms(q: int) -> dict:
    e = lambda k: eps_pow(q, k)
    atoms = {
        "t0": (HallElem.indicator(kr.enumerate_classes((1, 0), q)[0]), (1, 0)),
        "t1": (HallElem.indicator(kr.enumerate_classes((0, 1), q)[0]), (0, 1)),
        "g1": (HallElem.indicator(IsoClass.from_labels(q, [IndecompLabel.preinj(2)])).scale(e(-4)), (2, 1)),
    }
    for n in (1, 2):
        atoms[f"r{n}"] = (HallElem.constant(q, (n, n), e(-2 * n * n), predicate=lambda c: c.is_regular), (n, n))
    for d in (1, 2, 3):
        atoms[f"E{d}"] = (HallElem.constant(q, (d, d), e(-2 * d * d)), (d, d))
        atoms[f"one{d}"] = (HallElem.constant(q, (d, d)), (d, d))
    return atoms


@dataclass(frozen=True)
class Term:
    coeff: QEps
    word: tuple
    s_mult: int = 0  # coefficient carries eps**(s * s_mult)


@dataclass
class Anchor:
    name: str
    params: tuple
    lhs: list
    rhs: list


def twist_vector(word, grades) -> tuple:
    """Coefficients (m00, m01, m10, m11) of the twist exponent of a word."""
    m = [0, 0, 0, 0]
    prefix = (0, 0)
    for k, a in enumerate(word):
        g = grades[a]
        if k:
            m[0] += prefix[0] * g[0]
            m[1] += prefix[0] * g[1]
            m[2] += prefix[1] * g[0]
            m[3] += prefix[1] * g[1]
        prefix = add_dims(prefix, g)
    return tuple(m)


def build_anchors(q: int, names=DEFAULT_ANCHORS, a2_literal=False) -> list[Anchor]:
    e = lambda k: eps_pow(q, k)
    one = QEps(q, 1)
    out = []
    for name in names:
        if name == "A1":
            for i, j in ((0, 1), (1, 0)):
                ti, tj = f"t{i}", f"t{j}"
                terms = []
                for k in range(4):
                    c = QEps(q, (-1) ** k) / (qfactorial(k, q) * qfactorial(3 - k, q))
                    s_mult = k * (k - 1) // 2 + (3 - k) * (2 - k) // 2
                    terms.append(Term(c, (ti,) * k + (tj,) + (ti,) * (3 - k), s_mult))
                out.append(Anchor("A1", (i, j), terms, []))
        elif name == "A2":
            for d in (1, 2, 3):
                c = one / (qfactorial(d, q) * qfactorial(d, q))
                lhs = [Term(c, ("t0",) * d + ("t1",) * d, d * (d - 1))]
                rhs = [Term(one, (f"one{d}",) if a2_literal else (f"E{d}",))]
                out.append(Anchor("A2-literal" if a2_literal else "A2", (d,), lhs, rhs))
        elif name == "A3":
            for order in ("01", "10"):
                for label, k in A3_SCALARS.items():
                    a, b = ("t0", "t1") if order == "01" else ("t1", "t0")
                    lhs = [Term(one, ("r1",))]
                    rhs = [Term(one, (a, b)), Term(-e(k), (b, a))]
                    out.append(Anchor("A3", (order, label), lhs, rhs))
        elif name == "A4":
            # [2] rho_2 = eps^-1 phi_1 rho_1 + phi_2, phi_1 = t0 t1 - eps^-2 t1 t0, phi_2 = g1 t1 - eps^-2 t1 g1
            lhs = [Term(qint(2, q), ("r2",))]
            rhs = [Term(e(-1), ("t0", "t1", "r1")), Term(-e(-3), ("t1", "t0", "r1")),
                   Term(one, ("g1", "t1")), Term(-e(-2), ("t1", "g1"))]
            out.append(Anchor("A4", (2,), lhs, rhs))
        else:
            raise ValueError(f"unknown anchor {name!r}")
    return out


class WordEvaluator:
    """Untwisted word values for one field and factor order."""

    def __init__(self, q: int, factor_order: str):
        self.q = q
        self.atoms = _atoms(q)
        self.grades = {k: g for k, (_, g) in self.atoms.items()}
        conv = TwistConvention(factor_order, ((0, 0), (0, 0)))
        self.algebra = HallAlgebra(q, conv)
        self._cache: dict = {}

    def untwisted(self, word) -> HallElem:
        hit = self._cache.get(word)
        if hit is None:
            if len(word) == 1:
                hit = self.atoms[word[0]][0]
            else:
                hit = self.algebra.product(self.untwisted(word[:-1]), self.atoms[word[-1]][0])
            self._cache[word] = hit
        return hit

    def evaluate(self, terms, t, s) -> HallElem:
        total = HallElem.zero(self.q)
        for term in terms:
            m = twist_vector(term.word, self.grades)
            k = m[0] * t[0][0] + m[1] * t[0][1] + m[2] * t[1][0] + m[3] * t[1][1] + s * term.s_mult
            total = total + self.untwisted(term.word).scale(term.coeff * eps_pow(self.q, k))
        return total


def discrepancy(lhs: HallElem, rhs: HallElem):
    """(sign, k) when lhs == sign * eps^k * rhs, else None."""
    if rhs.is_zero() or lhs.is_zero():
        return None
    r = lhs.ratio_to(rhs)
    return None if r is None else r.signed_eps_power()


def anchor_holds(ev: WordEvaluator, anchor: Anchor, t, s) -> bool:
    return ev.evaluate(anchor.lhs, t, s) == ev.evaluate(anchor.rhs, t, s)


def anchor_report(conv: TwistConvention, q: int, names=DEFAULT_ANCHORS + ("A2-literal",)) -> list[dict]:
    """Per-anchor verdicts with eps-power discrepancies for one convention."""
    ev = _evaluator(q, conv.factor_order)
    rows = []
    for name in names:
        anchors = build_anchors(q, ("A2",), a2_literal=True) if name == "A2-literal" else build_anchors(q, (name,))
        for a in anchors:
            lhs = ev.evaluate(a.lhs, conv.t, conv.divided)
            rhs = ev.evaluate(a.rhs, conv.t, conv.divided)
            ok = lhs == rhs
            rows.append({"anchor": a.name, "params": list(a.params), "q": q, "pass": ok,
                         "discrepancy": None if ok else _disc_json(lhs, rhs)})
    return rows


def _disc_json(lhs: HallElem, rhs: HallElem) -> dict:
    """An eps-power unit when the two sides are proportional, else the size of the difference."""
    d = discrepancy(lhs, rhs)
    if d is not None:
        return {"sign": d[0], "eps_power": d[1]}
    return {"difference_support": len((lhs - rhs).support())}


_EVALUATORS: dict = {}


def _evaluator(q, order) -> WordEvaluator:
    key = (q, order)
    if key not in _EVALUATORS:
        _EVALUATORS[key] = WordEvaluator(q, order)
    return _EVALUATORS[key]


# ---------------------------------------------------------------------------
# search


def _candidates():
    for order in (SUB_FIRST, QUOT_FIRST):
        for t00, t01, t10, t11 in itertools.product(TWIST_RANGE, repeat=4):
            for s in DIVIDED_RANGE:
                yield order, ((t00, t01), (t10, t11)), s


def search(q_list, anchors=DEFAULT_ANCHORS) -> list[tuple]:
    """All (factor_order, t, divided) passing every anchor at every q (A3: some variant)."""
    built = {q: [(a.name, a) for a in build_anchors(q, anchors)] for q in q_list}
    survivors = []
    for order, t, s in _candidates():
        ok = True
        for q in q_list:
            ev = _evaluator(q, order)
            a3_hit = None
            for name, a in built[q]:
                if name == "A3":
                    if a3_hit is None:
                        a3_hit = False
                    if not a3_hit and anchor_holds(ev, a, t, s):
                        a3_hit = True
                    continue
                if a3_hit is False:
                    break
                if not anchor_holds(ev, a, t, s):
                    ok = False
                    break
            if a3_hit is False:
                ok = False
            if not ok:
                break
        if ok:
            survivors.append((order, t, s))
    return survivors


def a3_variants(conv: TwistConvention, q: int) -> list:
    ev = _evaluator(q, conv.factor_order)
    return [a.params for a in build_anchors(q, ("A3",)) if anchor_holds(ev, a, conv.t, conv.divided)]


# ---------------------------------------------------------------------------
# coproduct twist (anchor A5: the coproduct is multiplicative)


def _a5_words():
    return [("t0",), ("t1",), ("t0", "t1"), ("t1", "t0"), ("t0", "t0"), ("t1", "t1")]


def coproduct_search(conv: TwistConvention, q_list) -> list[tuple]:
    """All (u, tensor rule) for which Delta(xy) = Delta(x) Delta(y) on small words."""
    prepared = [_prepare_a5(conv, q) for q in q_list]
    survivors = []
    for rule in TENSOR_RULES:
        for u in itertools.product(TWIST_RANGE, repeat=4):
            uu = ((u[0], u[1]), (u[2], u[3]))
            trial = TwistConvention(conv.factor_order, conv.t, uu, conv.divided, rule)
            if all(_a5_holds(trial, prep) for prep in prepared):
                survivors.append((uu, rule))
    return survivors


def _split_pieces(alg: HallAlgebra, f: HallElem) -> dict:
    """Untwisted coproduct grouped by (b, c)."""
    out: dict = {}
    for (y, z), v in alg.coproduct(f).items():
        out.setdefault((y.dims, z.dims), {})[(y, z)] = v
    return out


def _prepare_a5(conv: TwistConvention, q: int):
    base = TwistConvention(conv.factor_order, conv.t, ((0, 0), (0, 0)), conv.divided)
    alg = HallAlgebra(q, base)
    ev = _evaluator(q, conv.factor_order)
    elems = {}
    for w in _a5_words():
        el = alg.mul(*[ev.atoms[a][0] for a in w])
        elems[w] = el
    cases = []
    for x, y in itertools.product(_a5_words(), repeat=2):
        if len(x) + len(y) > 3:
            continue
        xy = alg.product(elems[x], elems[y])
        dx, dy, dxy = _split_pieces(alg, elems[x]), _split_pieces(alg, elems[y]), _split_pieces(alg, xy)
        pieces = {}
        for (b1, c1), px in dx.items():
            for (b2, c2), py in dy.items():
                prod = {}
                for (y1, z1), a in px.items():
                    for (y2, z2), b in py.items():
                        left = alg.product(HallElem.indicator(y1), HallElem.indicator(y2))
                        right = alg.product(HallElem.indicator(z1), HallElem.indicator(z2))
                        for yy, vy in left.coeffs.items():
                            for zz, vz in right.coeffs.items():
                                key = (yy, zz)
                                val = a * b * vy * vz
                                prod[key] = prod[key] + val if key in prod else val
                pieces[(b1, c1, b2, c2)] = prod
        cases.append((dxy, pieces))
    return q, cases


def _a5_holds(conv: TwistConvention, prepared) -> bool:
    q, cases = prepared
    for dxy, pieces in cases:
        rhs: dict = {}
        for (b1, c1, b2, c2), prod in pieces.items():
            k = (conv.coproduct_exponent(b1, c1) + conv.coproduct_exponent(b2, c2)
                 + conv.tensor_exponent((b1, c1), (b2, c2)))
            s = eps_pow(q, k)
            for key, v in prod.items():
                rhs[key] = rhs[key] + v * s if key in rhs else v * s
        lhs: dict = {}
        for (b, c), piece in dxy.items():
            s = eps_pow(q, conv.coproduct_exponent(b, c))
            for key, v in piece.items():
                lhs[key] = v * s
        keys = set(lhs) | set(rhs)
        for key in keys:
            if lhs.get(key, QEps(q)) != rhs.get(key, QEps(q)):
                return False
    return True


# ---------------------------------------------------------------------------
# driver


@dataclass
class CalibrationResult:
    q_list: tuple
    conventions: list
    reports: dict = field(default_factory=dict)
    a3_variants: dict = field(default_factory=dict)
    coproduct_candidates: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "q_list": list(self.q_list),
            "conventions": [c.to_json() | {"hash": c.hash} for c in self.conventions],
            "reports": self.reports,
            "a3_variants": self.a3_variants,
            "coproduct_candidates": self.coproduct_candidates,
        }


def calibrate(q_list=(2, 3), anchors=DEFAULT_ANCHORS, cache_dir=None, with_coproduct=True) -> CalibrationResult:
    q_list = tuple(sorted(q_list))
    found = search(q_list, anchors)
    if not found:
        best = _closest(q_list, anchors)
        report = {str(q): anchor_report(best, q) for q in q_list}
        raise NoConventionFound("no convention satisfies the anchors", {"closest": best.to_json(), "anchors": report})
    conventions = []
    coproduct_candidates = {}
    for order, t, s in found:
        conv = TwistConvention(order, t, ((0, 0), (0, 0)), s)
        if with_coproduct:
            cands = coproduct_search(conv, q_list)
            coproduct_candidates[conv.hash] = [{"u": [list(r) for r in u], "tensor": rule} for u, rule in cands]
            if cands:
                u, rule = _prefer(cands)
                conv = TwistConvention(order, t, u, s, rule)
        conventions.append(conv)
    result = CalibrationResult(q_list, conventions)
    result.coproduct_candidates = coproduct_candidates
    for conv in conventions:
        result.reports[conv.hash] = {str(q): anchor_report(conv, q) for q in q_list}
        result.a3_variants[conv.hash] = {str(q): [list(v) for v in a3_variants(conv, q)] for q in q_list}
    if cache_dir is not None:
        path = Path(cache_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / "calibration.json").write_text(json.dumps(result.to_json(), indent=1, sort_keys=True))
    return result


def _prefer(cands):
    """Canonical pick among coproduct solutions: first tensor rule, then smallest |u|."""
    return min(cands, key=lambda c: (TENSOR_RULES.index(c[1]), sum(abs(x) for r in c[0] for x in r), c[0]))


def _closest(q_list, anchors) -> TwistConvention:
    best, score = None, -1
    for order, t, s in _candidates():
        passed = 0
        for q in q_list:
            ev = _evaluator(q, order)
            for a in build_anchors(q, anchors):
                passed += anchor_holds(ev, a, t, s)
        if passed > score:
            best, score = TwistConvention(order, t, ((0, 0), (0, 0)), s), passed
    return best


def load_calibration(cache_dir) -> CalibrationResult | None:
    path = Path(cache_dir) / "calibration.json"
    if not path.exists():
        return None
    obj = json.loads(path.read_text())
    res = CalibrationResult(tuple(obj["q_list"]), [TwistConvention.from_json(c) for c in obj["conventions"]])
    res.reports = obj.get("reports", {})
    res.a3_variants = obj.get("a3_variants", {})
    res.coproduct_candidates = obj.get("coproduct_candidates", {})
    return res


def select(result: CalibrationResult) -> TwistConvention:
    if len(result.conventions) != 1:
        raise MultipleConventions(result.conventions)
    return result.conventions[0]
