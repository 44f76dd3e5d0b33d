"""Executable checks for the identities satisfied by the Kronecker Hall algebra.

Every check returns a CheckReport whose discrepancy is an exact element
(a HallElem, a QEps, or a list of offending entries); pass means it is zero.

Indexing follows dimension vectors: Gamma(k) has grade (k+1, k), Mu(k) has
grade (k, k+1).  Where a statement is traditionally written with gamma_k,
mu_k of grades (k, k-1), (k-1, k), the check takes those indices and
converts (gamma_k = Gamma(k-1), mu_k = Mu(k-1)).
"""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

from . import kronrep as kr
from . import exactfield as ef
from . import symfun
from .generators import Generators
from .hall import DEFAULT_CONVENTION, HallAlgebra, HallElem, TwistConvention
from .kronrep import IndecompLabel, IsoClass, MINUS, PLUS
from .qeps import QEps, qint

# ---------------------------------------------------------------------------
# reports and shared state


@dataclass
class CheckReport:
    id: str
    params: dict
    q: int
    convention: str
    passed: bool
    discrepancy: object = None
    note: str = ""
    extra: dict = field(default_factory=dict)

    def _disc_json(self):
        d = self.discrepancy
        if d is None:
            return None
        if isinstance(d, (HallElem, QEps)):
            return d.to_json()
        if isinstance(d, Fraction):
            return str(d)
        return d

    def to_json(self) -> dict:
        out = {"id": self.id, "params": self.params, "q": self.q, "convention": self.convention,
               "pass": self.passed, "discrepancy": self._disc_json()}
        if self.note:
            out["note"] = self.note
        if self.extra:
            out["extra"] = self.extra
        return out

    def sort_key(self):
        return (self.id, self.q, sorted((k, str(v)) for k, v in self.params.items()))


_STORE = None
_CONTEXTS: dict = {}


def set_store(store) -> None:
    """Attach a persistent Hall-number store to every algebra built from now on."""
    global _STORE
    _STORE = store
    _CONTEXTS.clear()


def context(q: int, convention: TwistConvention | None = None) -> Generators:
    conv = convention or DEFAULT_CONVENTION
    key = (q, conv.hash)
    gens = _CONTEXTS.get(key)
    if gens is None:
        gens = Generators(HallAlgebra(q, conv, _STORE))
        _CONTEXTS[key] = gens
    return gens


def _unit_note(lhs: HallElem, rhs: HallElem) -> str:
    r = lhs.ratio_to(rhs) if not rhs.is_zero() else None
    if r is None:
        return ""
    se = r.signed_eps_power()
    if se is None:
        return f"lhs = ({r!r}) * rhs"
    sign, k = se
    return f"lhs = {'-' if sign < 0 else ''}eps^{k} * rhs"


def _compare(cid, params, g: Generators, lhs: HallElem, rhs: HallElem, note="") -> CheckReport:
    diff = lhs - rhs
    ok = diff.is_zero()
    if not ok:
        unit = _unit_note(lhs, rhs)
        note = f"{note}; {unit}" if note and unit else (note or unit)
    return CheckReport(cid, params, g.q, g.alg.convention.hash, ok, diff, note)


def _combine(cid, params, g: Generators, parts) -> CheckReport:
    """Merge sub-reports: pass iff all pass; discrepancies listed per part."""
    ok = all(p.passed for p in parts)
    disc = None if ok else {p.note or str(i): p._disc_json() for i, p in enumerate(parts) if not p.passed}
    notes = "; ".join(p.note for p in parts if p.note and not p.passed)
    return CheckReport(cid, params, g.q, g.alg.convention.hash, ok, disc, notes)


# ---------------------------------------------------------------------------
# relations among generators


def check_serre(i: int, q: int, convention=None) -> CheckReport:
    """sum_k (-1)^k th_i^(k) th_j th_i^(3-k) = 0 with j = 1 - i."""
    g = context(q, convention)
    j = 1 - i
    total = HallElem.zero(q)
    for k in range(4):
        term = g.alg.mul(g.theta_div(i, k), g.theta(j), g.theta_div(i, 3 - k))
        total = total + term.scale((-1) ** k)
    return _compare("serre", {"i": i, "j": j}, g, total, HallElem.zero(q))


def check_relation(n: int, q: int, convention=None) -> CheckReport:
    """[n] rho_n = sum_{i=1}^n eps^(i-n) phi_i rho_(n-i)."""
    g = context(q, convention)
    lhs = g.rho(n).scale(qint(n, q))
    rhs = HallElem.zero(q)
    for i in range(1, n + 1):
        rhs = rhs + g.alg.product(g.phi(i), g.rho(n - i)).scale(g.e(i - n))
    return _compare("relation", {"n": n}, g, lhs, rhs)


def check_ptilde(n: int, q: int, convention=None) -> CheckReport:
    g = context(q, convention)
    return _compare("ptilde", {"n": n}, g, g.ptilde(n), g.rho(n))


def _series_ratio(g: Generators, a: int, b: int, N: int) -> list:
    """Coefficients of rho(eps^a u) / rho(eps^b u) up to u^N."""
    out = [g.alg.unit()]
    for n in range(1, N + 1):
        acc = g.rho(n).scale(g.e(a * n))
        for k in range(1, n + 1):
            acc = acc - g.alg.product(g.rho(k), out[n - k]).scale(g.e(b * k))
        out.append(acc)
    return out


def check_pseries(N: int, q: int, convention=None, reading="derived") -> CheckReport:
    """Generating-function form of the rho/phi relation, truncated at u^N.

    reading "printed":  rho(eps^-1 u)/rho(eps u) = 1 + (eps - eps^-1) Phi(u)
    reading "derived":  rho(eps u)/rho(eps^-1 u) = 1 + (eps - eps^-1) Phi(u),
    the form that follows coefficientwise from the relation [n] rho_n = ...
    """
    g = context(q, convention)
    a, b = (-1, 1) if reading == "printed" else (1, -1)
    ratio = _series_ratio(g, a, b, N)
    c = g.e(1) - g.e(-1)
    parts = []
    for n in range(1, N + 1):
        rep = _compare("pseries", {"N": N, "n": n}, g, ratio[n], g.phi(n).scale(c), note=f"u^{n}")
        parts.append(rep)
    out = _combine("pseries", {"N": N, "reading": reading}, g, parts)
    return out


def check_corollary4(k: int, l: int, q: int, convention=None) -> CheckReport:
    """gamma_k mu_l - eps^-2 mu_l gamma_k = phi_(k+l-1), gamma_k = Gamma(k-1), mu_l = Mu(l-1)."""
    if k < 1 or l < 1:
        raise ValueError("corollary4 needs k, l >= 1")
    g = context(q, convention)
    lhs = g.alg.commutator(g.gamma(k - 1), g.mu(l - 1), g.e(-2))
    phi = g.phi(k + l - 1)
    # for l = 1 the equality is the definition of phi; regular support carries the content
    parts = [_compare("corollary4", {}, g, lhs, phi, "commutator"),
             _compare("corollary4", {}, g, phi, phi.restrict_regular(), "regular support")]
    return _combine("corollary4", {"k": k, "l": l}, g, parts)


def check_lemma_comm(r: int, s: int, q: int, convention=None) -> CheckReport:
    """rho_r mu_s = sum_i [r-i+1] mu_(r+s-i) rho_i and the mirror gamma_s rho_r = ..."""
    if r < 0 or s < 1:
        raise ValueError("lemma_comm needs r >= 0, s >= 1")
    g = context(q, convention)
    prod = g.alg.product
    lhs1 = prod(g.rho(r), g.mu(s - 1))
    rhs1 = HallElem.zero(q)
    lhs2 = prod(g.gamma(s - 1), g.rho(r))
    rhs2 = HallElem.zero(q)
    for i in range(r + 1):
        c = qint(r - i + 1, q)
        rhs1 = rhs1 + prod(g.mu(r + s - i - 1), g.rho(i)).scale(c)
        rhs2 = rhs2 + prod(g.rho(i), g.gamma(r + s - i - 1)).scale(c)
    parts = [_compare("lemma_comm", {}, g, lhs1, rhs1, "mu half"),
             _compare("lemma_comm", {}, g, lhs2, rhs2, "gamma half")]
    return _combine("lemma_comm", {"r": r, "s": s}, g, parts)


# ---------------------------------------------------------------------------
# Drinfeld relations under x_r -> Mu(r), y_r -> -Gamma(r-1), h_r -> eta_r


class _Images:
    """Images of the Drinfeld generators, optionally transported by tau."""

    def __init__(self, g: Generators, orientation=PLUS):
        self.g = g
        self.minus = orientation == MINUS

    def _t(self, f):
        return self.g.alg.tau(f) if self.minus else f

    def x(self, r):
        return self._t(self.g.mu(r))

    def y(self, r):
        if r < 1:
            raise ValueError("y_r needs r >= 1")
        return self._t(self.g.gamma(r - 1).scale(-1))

    def h(self, r):
        return self._t(self.g.eta(r))

    def psi(self, n, reading):
        """psi^+_n, either by the printed series 1 + (e - e^-1) sum psi u^s = exp(...)
        or by the standard one sum_{s>=0} psi u^s = exp((e - e^-1) sum h u^r)."""
        g = self.g
        c = g.e(1) - g.e(-1)
        coeffs = _exp_series(g, [self.h(r).scale(c) for r in range(1, n + 1)], n,
                             unit=g.alg.unit(MINUS if self.minus else PLUS))
        return coeffs[n].scale(c.inverse()) if reading == "printed" else coeffs[n]


def _exp_series(g: Generators, a: list, n: int, unit) -> list:
    """Coefficients of exp(sum_{r>=1} a[r-1] u^r) via k E_k = sum_j j a_j E_(k-j)."""
    out = [unit]
    for k in range(1, n + 1):
        acc = HallElem.zero(g.q, unit.orientation)
        for j in range(1, k + 1):
            acc = acc + g.alg.product(a[j - 1], out[k - j]).scale(j)
        out.append(acc.scale(Fraction(1, k)))
    return out


DRINFELD_SIGNS = {1: 1, 2: -1}


def check_drinfeld(rel: int, idx: tuple, q: int, convention=None, orientation=PLUS,
                   reading="standard") -> CheckReport:
    """One Drinfeld relation at index tuple idx.

    (1) idx=(s, r): [h_s, x_r] = [2s]/s x_(r+s)
    (2) idx=(s, r): [h_s, y_r] = -[2s]/s y_(r+s)
    (3) idx=(r, s): x_(r+1) x_s - e^2 x_s x_(r+1) = e^2 x_r x_(s+1) - x_(s+1) x_r
    (4) idx=(r, s): y_(r+1) y_s - e^-2 y_s y_(r+1) = e^-2 y_r y_(s+1) - y_(s+1) y_r
    (5) idx=(r, s): e^-2 x_r y_s - y_s x_r = psi^+_(r+s) / (e - e^-1)

    The sign in (1), (2) is the one fixed by the +/- superscript of the
    generator.  In (5), `reading` chooses the normalization of psi^+ (see
    _Images.psi); with "standard" the right side is psi^+/(e - e^-1).
    orientation MINUS runs the relation on tau-images in the opposite
    orientation.
    """
    g = context(q, convention)
    im = _Images(g, orientation)
    alg = g.alg
    params = {"rel": rel, "idx": list(idx), "orientation": orientation}
    if rel in (1, 2):
        s, r = idx
        gen = im.x if rel == 1 else im.y
        lhs = alg.commutator(im.h(s), gen(r))
        rhs = gen(r + s).scale(qint(2 * s, q) * Fraction(DRINFELD_SIGNS[rel], s))
    elif rel in (3, 4):
        r, s = idx
        gen = im.x if rel == 3 else im.y
        e2 = g.e(2 if rel == 3 else -2)
        lhs = alg.commutator(gen(r + 1), gen(s), e2)
        rhs = alg.product(gen(r), gen(s + 1)).scale(e2) - alg.product(gen(s + 1), gen(r))
    elif rel == 5:
        r, s = idx
        params["reading"] = reading
        lhs = alg.product(im.x(r), im.y(s)).scale(g.e(-2)) - alg.product(im.y(s), im.x(r))
        rhs = im.psi(r + s, reading).scale((g.e(1) - g.e(-1)).inverse())
    else:
        raise ValueError(f"no Drinfeld relation ({rel})")
    return _compare("drinfeld", params, g, lhs, rhs)


def drinfeld_grade(rel: int, idx: tuple) -> tuple:
    """Grade of relation (rel) at idx."""
    a, b = idx
    n = a + b
    return {1: (n, n + 1), 2: (n, n - 1), 3: (n + 1, n + 3), 4: (n + 1, n - 1), 5: (n, n)}[rel]


def drinfeld_indices(rel: int, max_grade=(4, 4)) -> list[tuple]:
    """Valid index tuples whose relation lives in a grade <= max_grade componentwise."""
    out = []
    for a in range(0, sum(max_grade) + 1):
        for b in range(0, sum(max_grade) + 1):
            if rel in (1, 2) and (a < 1 or (rel == 2 and b < 1)):
                continue
            if rel == 4 and (a < 1 or b < 1):
                continue
            if rel == 5 and b < 1:
                continue
            d = drinfeld_grade(rel, (a, b))
            if d[0] <= max_grade[0] and d[1] <= max_grade[1]:
                out.append((a, b))
    return out


def check_q_identity(m: int, q: int) -> CheckReport:
    """sum_{i=1}^m [2i]/[i] [m-i+1] = m [m+1]."""
    lhs = QEps(q)
    for i in range(1, m + 1):
        lhs = lhs + qint(2 * i, q) / qint(i, q) * qint(m - i + 1, q)
    rhs = qint(m + 1, q) * m
    diff = lhs - rhs
    return CheckReport("q_identity", {"m": m}, q, "", not diff, diff)


# ---------------------------------------------------------------------------
# symmetric functions


def check_kostka(lam, q: int, convention=None) -> CheckReport:
    """rho_lam = sum_mu K_(mu lam) s_mu, together with r(flag monomial of lam) = rho_lam."""
    lam = tuple(p for p in lam if p)
    g = context(q, convention)
    n = sum(lam)
    rho_lam = g.rho_product(lam)
    expansion = HallElem.zero(q)
    for mu in symfun.partitions_of(n):
        k = symfun.kostka(mu, lam)
        if k:
            expansion = expansion + g.schur(mu).scale(k)
    parts = [_compare("kostka", {}, g, rho_lam, expansion, "schur expansion"),
             _compare("kostka", {}, g, g.flag_monomial(lam).restrict_regular(), rho_lam, "flag monomial")]
    return _combine("kostka", {"lambda": list(lam)}, g, parts)


# ---------------------------------------------------------------------------
# coproduct


def check_coproduct_rho(k: int, q: int, convention=None) -> CheckReport:
    """Delta(rho_k) - sum_i rho_i (x) rho_(k-i) is supported on pairs (A, B) where A has
    preinjective but no preprojective summands and B the reverse."""
    g = context(q, convention)
    delta = g.alg.coproduct(g.rho(k))
    for i in range(k + 1):
        for key, v in g.alg.tensor(g.rho(i), g.rho(k - i)).items():
            delta[key] = delta.get(key, QEps(q)) - v
    bad = []
    for (a, b), v in sorted(delta.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())):
        if not v:
            continue
        if a.has_preproj or not a.has_preinj or b.has_preinj or not b.has_preproj:
            bad.append([a.to_json(), b.to_json(), v.to_json()])
    ok = not bad
    return CheckReport("coproduct_rho", {"k": k}, q, g.alg.convention.hash, ok, None if ok else bad)


def hopf_defect(alg: HallAlgebra, x: HallElem, y: HallElem, z: HallElem) -> QEps:
    """(xy, z) - (x (x) y, Delta z) for homogeneous x, y."""
    (b,), (c,) = x.grades(), y.grades()
    lhs = alg.inner(alg.product(x, y), z)
    rhs = QEps(alg.q)
    for (yy, zz), v in alg.coproduct(z, b, c).items():
        xv, yv = x.coeffs.get(yy), y.coeffs.get(zz)
        if xv is None or yv is None:
            continue
        rhs = rhs + v * alg.inner(HallElem.indicator(yy, xv), HallElem.indicator(yy)) * \
            alg.inner(HallElem.indicator(zz, yv), HallElem.indicator(zz))
    return lhs - rhs


# ---------------------------------------------------------------------------
# projection onto the regular part


def _theta_words(n: int):
    for pos in itertools.combinations(range(2 * n), n):
        yield tuple(0 if i in pos else 1 for i in range(2 * n))


class _WordEvaluator:
    """Products of theta words, memoized on prefixes."""

    def __init__(self, g: Generators):
        self.g = g
        self.memo = {(): g.alg.unit()}

    def __call__(self, w) -> HallElem:
        w = tuple(w)
        if w not in self.memo:
            self.memo[w] = self.g.alg.product(self(w[:-1]), self.g.theta(w[-1]))
        return self.memo[w]


def solve_in_span(vectors: list, target: dict, q: int):
    """Exact coefficients c with sum c_i vectors[i] = target (dicts key -> QEps), or None."""
    keys = sorted({k for v in vectors for k in v} | set(target), key=_key_order)
    m = len(vectors)
    rows = [[v.get(k, QEps(q)) for v in vectors] + [target.get(k, QEps(q))] for k in keys]
    piv_cols = []
    r = 0
    for col in range(m):
        pr = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [a * inv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    if any(rows[i][m] for i in range(r, len(rows))):
        return None
    sol = [QEps(q)] * m
    for i, col in enumerate(piv_cols):
        sol[col] = rows[i][m]
    return sol


def _key_order(k):
    return k.sort_key() if isinstance(k, IsoClass) else k


def check_projection(n: int, q: int, convention=None) -> CheckReport:
    """(f - r(f), g) = 0 on a spanning set, r(f) in the span of the rho monomials,
    and the Hopf pairing identity (th_i w', g) = (th_i (x) w', Delta g)."""
    g = context(q, convention)
    alg = g.alg
    basis = {lam: g.rho_product(lam) for lam in symfun.partitions_of(n)}
    word = _WordEvaluator(g)
    words = {w: word(w) for w in _theta_words(n)}
    tests = dict(("theta" + "".join(map(str, w)), f) for w, f in words.items())
    for k in range(1, n + 1):
        l = n + 1 - k
        tests[f"gamma{k}mu{l}"] = alg.product(g.gamma(k - 1), g.mu(l - 1))
        tests[f"mu{l}gamma{k}"] = alg.product(g.mu(l - 1), g.gamma(k - 1))
    bad = []
    vecs = [basis[lam].coeffs for lam in basis]
    for name, f in tests.items():
        rf = f.restrict_regular()
        for lam, b in basis.items():
            v = alg.inner(f - rf, b)
            if v:
                bad.append(["orthogonality", name, list(lam), v.to_json()])
        if solve_in_span(vecs, rf.coeffs, q) is None:
            bad.append(["span", name])
    for w, f in words.items():
        head, tail = g.theta(w[0]), word(w[1:])
        for lam, b in basis.items():
            d = hopf_defect(alg, head, tail, b)
            if d:
                bad.append(["hopf", "".join(map(str, w)), list(lam), d.to_json()])
    ok = not bad
    return CheckReport("projection", {"n": n}, q, alg.convention.hash, ok, None if ok else bad,
                       extra={"test_elements": len(tests)})


def check_theta_norm(i: int, q: int, convention=None) -> CheckReport:
    g = context(q, convention)
    v = g.alg.inner(g.theta(i), g.theta(i))
    diff = v - QEps(q, Fraction(q, q - 1))
    return CheckReport("theta_norm", {"i": i}, q, g.alg.convention.hash, not diff, diff)


# ---------------------------------------------------------------------------
# regular expressibility


def _orbit_multiple(f: HallElem):
    """(eps exponent, class) if f = +-eps^k 1_c for a single class c."""
    if len(f.coeffs) != 1:
        return None
    (c, v), = f.coeffs.items()
    se = v.signed_eps_power()
    if se is None or se[0] != 1:
        return None
    return se[1], c


def _ordered_products(g: Generators, kind: str, indices: tuple) -> HallElem:
    if kind == "gamma":  # gamma_(i_r) ... gamma_(i_1), decreasing
        factors = [g.gamma(i - 1) for i in sorted(indices, reverse=True)]
    else:  # mu_(j_1) ... mu_(j_s), increasing
        factors = [g.mu(j - 1) for j in sorted(indices)]
    return g.alg.mul(*factors)


def _index_multisets(total_dims, kind):
    """Multisets of 1-based subscripts whose dimension vectors sum to total_dims."""
    d0, d1 = total_dims
    n_factors = d0 - d1 if kind == "gamma" else d1 - d0
    if n_factors < 0:
        return
    if n_factors == 0:
        if d0 == d1 == 0:
            yield ()
        return
    weight = d1 if kind == "gamma" else d0  # sum of (i - 1) over factors

    def rec(left, count, smallest):
        if count == 0:
            if left == 0:
                yield ()
            return
        for a in range(smallest, left + 1):
            for rest in rec(left - a, count - 1, a):
                yield (a + 1,) + rest
    yield from rec(weight, n_factors, 0)


def check_regular_expressibility(n: int, q: int, convention=None, max_total: int = 8) -> CheckReport:
    """(a) ordered products of distinct gamma's / mu's are eps-power multiples of orbit
    indicators; (b) eps^-dimE 1_(E - E^r) at grade (n, n) lies in the span of the
    products mu_P rho_k gamma_I with k < n."""
    g = context(q, convention)
    alg = g.alg
    bad = []
    found = []
    for kind in ("gamma", "mu"):
        for size in range(2, n + 2):
            for idx in itertools.combinations(range(1, n + 2), size):
                dim = sum(2 * i - 1 for i in idx)
                if dim > max_total:
                    continue
                f = _ordered_products(g, kind, idx)
                hit = _orbit_multiple(f)
                labels = [IndecompLabel.preinj(i) if kind == "gamma" else IndecompLabel.preproj(i) for i in idx]
                target = IsoClass.from_labels(q, labels)
                if hit is None or hit[1] != target:
                    bad.append(["orbit product", kind, list(idx)])
                else:
                    found.append([kind, list(idx), hit[0]])
    # (b)
    d = (n, n)
    comp = HallElem.constant(q, d, g.e(-2 * n * n), predicate=lambda c: not c.is_regular)
    spanning = []
    for k in range(n):
        m = n - k
        for np_ in range(1, m + 1):
            for p_dims in _split_dims(m, np_):
                i_dims = (m - p_dims[0], m - p_dims[1])
                for P in _index_multisets(p_dims, "mu"):
                    for I in _index_multisets(i_dims, "gamma"):
                        f = alg.mul(_ordered_products(g, "mu", P) if P else alg.unit(), g.rho(k),
                                    _ordered_products(g, "gamma", I) if I else alg.unit())
                        spanning.append(f.coeffs)
    if solve_in_span(spanning, comp.coeffs, q) is None:
        bad.append(["complement not in span", n])
    ok = not bad
    return CheckReport("regular_expressibility", {"n": n}, q, alg.convention.hash, ok,
                       None if ok else bad, extra={"orbit_products": found, "spanning_size": len(spanning)})


def _split_dims(m: int, n_factors: int):
    """Dimension vectors (a, a + n_factors) with 0 <= a, a + n_factors <= m."""
    for a in range(0, m - n_factors + 1):
        yield (a, a + n_factors)


# ---------------------------------------------------------------------------
# tau invariance


def check_tau_invariance(k: int, q: int, convention=None) -> CheckReport:
    """transpose_tau permutes regular classes of (k, k) and fixes rho_k."""
    g = context(q, convention)
    bad = []
    plus = [c for c in kr.enumerate_classes((k, k), q) if c.is_regular]
    minus = {c for c in kr.enumerate_classes((k, k), q, MINUS) if c.is_regular}
    images = set()
    for c in plus:
        img = kr.classify(kr.transpose_tau(kr.representative(c)))
        if img != c.dual():
            bad.append(["tau class", c.to_json()])
        images.add(img)
    if images != minus:
        bad.append(["not a bijection onto regular classes"])
    rho_minus = HallElem.constant(q, (k, k), g.e(-2 * k * k), MINUS, predicate=lambda c: c.is_regular)
    if g.alg.tau(g.rho(k)) != rho_minus:
        bad.append(["rho not fixed"])
    ok = not bad
    return CheckReport("tau_invariance", {"k": k}, q, g.alg.convention.hash, ok, None if ok else bad)


# ---------------------------------------------------------------------------
# counting claim in the proof of the rho/phi relation


def _line_key(v, p):
    for a in v:
        if a:
            inv = pow(a, p - 2, p)
            return tuple((x * inv) % p for x in v)
    raise ValueError("zero vector")


def _combine_rows(coords, basis, n, p):
    out = [0] * n
    for c, row in zip(coords, basis):
        if c:
            out = [(a + c * b) % p for a, b in zip(out, row)]
    return out


def _contains(big, small, p) -> bool:
    if not small:
        return True
    if not big:
        return False
    return ef.rank(tuple(big) + tuple(small), p) == len(big)


def counting_data(c: IsoClass) -> dict:
    """For a regular class of dims (n, n): every regular submodule W, and per line L of V_1
    the regular submodules containing it with the class of W/L."""
    x = kr.representative(c)
    p, n = x.p, x.d0
    regular_subs = []
    for k in range(1, n + 1):
        for w0, w1, sk, _ in kr.stable_pieces(x, (k, k)):
            if not kr.classify_key(sk).is_regular:
                continue
            sub = kr._from_key(sk)
            quotients = {}
            for _, lb, _, qk in kr.stable_pieces(sub, (0, 1)):
                line = _line_key(_combine_rows(lb[0], w1, n, p), p)
                quotients[line] = kr.classify_key(qk)
            regular_subs.append((k, w0, w1, quotients))
    return {"n": n, "p": p, "subs": regular_subs}


def check_counting(n: int, q: int) -> CheckReport:
    """For every regular class of dimension (n, n): the pairs (W, L) with W regular and
    W/L indecomposable preinjective number (q^n - 1)/(q - 1), and each line L lies in a
    unique minimal regular submodule R with R/L indecomposable preinjective."""
    bad = []
    expected = (q ** n - 1) // (q - 1)
    classes = [c for c in kr.enumerate_classes((n, n), q) if c.is_regular]
    lines = [_line_key(b[0], q) for b, _ in ef.subspace_bases(n, 1, q)]
    for c in classes:
        data = counting_data(c)
        pairs = 0
        for k, w0, w1, quots in data["subs"]:
            target = IsoClass.from_labels(q, [IndecompLabel.preinj(k)])
            pairs += sum(1 for cl in quots.values() if cl == target)
        if pairs != expected:
            bad.append(["count", c.to_json(), pairs])
        for line in lines:
            containing = [s for s in data["subs"] if line in s[3]]
            minimal = [s for s in containing if not any(
                t is not s and t[0] < s[0] and _contains(s[1], t[1], q) and _contains(s[2], t[2], q)
                for t in containing)]
            if len(minimal) != 1:
                bad.append(["minimal not unique", c.to_json(), list(line), len(minimal)])
                continue
            k, _, _, quots = minimal[0]
            if quots[line] != IsoClass.from_labels(q, [IndecompLabel.preinj(k)]):
                bad.append(["R/L not preinjective", c.to_json(), list(line)])
    ok = not bad
    return CheckReport("counting", {"n": n}, q, "", ok, None if ok else bad,
                       extra={"classes": len(classes), "expected": expected})


# ---------------------------------------------------------------------------
# Hom / Ext tables


def check_hom_vanishing(q: int, max_dim: int = 4) -> CheckReport:
    """Hom(I, P) = Hom(I, R) = Hom(R, P) = 0 over indecomposables of dims <= (max_dim, max_dim)."""
    labels = kr.indecomposables_up_to((max_dim, max_dim), q)
    reps = {l: kr.indecomposable_rep(l, q) for l in labels}
    bad = []
    forbidden = {("I", "P"), ("I", "R"), ("R", "P")}
    checked = 0
    for a in labels:
        for b in labels:
            if (a.kind, b.kind) in forbidden:
                checked += 1
                h = kr.hom_dim(reps[a], reps[b])
                if h:
                    bad.append([repr(a), repr(b), h])
    ok = not bad
    return CheckReport("homs", {"max_dim": max_dim}, q, "", ok, None if ok else bad, extra={"pairs": checked})


def check_ext_vanishing(q: int, max_k: int = 4) -> CheckReport:
    """Ext^1(I_j, I_k) = Ext^1(P_k, P_j) = 0 for j >= k."""
    bad = []
    for k in range(1, max_k + 1):
        for j in range(k, max_k + 1):
            ij, ik = (kr.indecomposable_rep(IndecompLabel.preinj(i), q) for i in (j, k))
            pk, pj = (kr.indecomposable_rep(IndecompLabel.preproj(i), q) for i in (k, j))
            for name, a, b in (("I", ij, ik), ("P", pk, pj)):
                e = kr.ext_dim(a, b)
                if e:
                    bad.append([name, j, k, e])
    ok = not bad
    return CheckReport("exts", {"max_k": max_k}, q, "", ok, None if ok else bad)


def check_fingerprints(d, q: int) -> CheckReport:
    classes = kr.enumerate_classes(d, q)
    seen = {}
    bad = []
    for c in classes:
        fp = kr.fingerprint(kr.representative(c), d)
        if fp in seen:
            bad.append([seen[fp].to_json(), c.to_json()])
        seen[fp] = c
    ok = not bad
    return CheckReport("fingerprints", {"d": list(d)}, q, "", ok, None if ok else bad,
                       extra={"classes": len(classes)})


# ---------------------------------------------------------------------------
# cross-q interpolation


@dataclass
class LaurentFit:
    """c(v) = sum_j even[j] v^(2j) + sum_j odd[j] v^(2j+1)."""
    even: dict
    odd: dict

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in list(self.even.values()) + list(self.odd.values()))

    def evaluate(self, q: int) -> QEps:
        a = sum((Fraction(c) * Fraction(q) ** j for j, c in self.even.items()), Fraction(0))
        b = sum((Fraction(c) * Fraction(q) ** j for j, c in self.odd.items()), Fraction(0))
        return QEps(q, a, b)

    def to_json(self) -> dict:
        terms = {2 * j: str(c) for j, c in self.even.items() if c}
        terms.update({2 * j + 1: str(c) for j, c in self.odd.items() if c})
        return {str(k): terms[k] for k in sorted(terms)}

    def __str__(self):
        items = sorted(self.to_json().items(), key=lambda kv: int(kv[0]))
        return " + ".join(f"{c}*v^{e}" for e, c in items) or "0"


def fit_laurent(values: dict, degree: int):
    """Laurent polynomial in q through {q: rational} with exponents in [-degree, degree].

    The window of exponents is the narrowest that fits all points while
    leaving at least one point unused for validation; returns (coeffs, None)
    or (None, reason).
    """
    qs = sorted(values)
    if not any(values[x] for x in qs):
        return {}, None
    for width in range(1, len(qs)):
        for lo in range(-degree, degree - width + 2):
            exps = list(range(lo, lo + width))
            sol = _solve_vandermonde(qs[:width], exps, [values[x] for x in qs[:width]])
            if sol is None:
                continue
            if all(sum(c * Fraction(x) ** e for c, e in zip(sol, exps)) == values[x] for x in qs):
                return {e: c for e, c in zip(exps, sol) if c}, None
    return None, "no fit with a validation point to spare"


def _solve_vandermonde(xs, exps, ys):
    m = len(xs)
    rows = [[Fraction(x) ** e for e in exps] + [Fraction(y)] for x, y in zip(xs, ys)]
    for col in range(m):
        pr = next((i for i in range(col, m) if rows[i][col]), None)
        if pr is None:
            return None
        rows[col], rows[pr] = rows[pr], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [a * inv for a in rows[col]]
        for i in range(m):
            if i != col and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return [rows[i][m] for i in range(m)]


@dataclass
class InterpolationResult:
    q_list: tuple
    fits: dict  # class type -> LaurentFit
    failures: dict  # class type -> reason

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def integral(self) -> bool:
        return all(f.is_integral() for f in self.fits.values())

    def to_json(self) -> dict:
        return {"q_list": list(self.q_list), "ok": self.ok, "integral": self.integral,
                "fits": [{"type": _type_json(t), "coefficient": f.to_json()} for t, f in self.fits.items()],
                "failures": [{"type": _type_json(t), "reason": r} for t, r in self.failures.items()]}


def _type_json(t):
    pre, inj, reg = t
    return {"preproj": [list(x) for x in pre], "preinj": [list(x) for x in inj],
            "regular": [[deg, list(part)] for deg, part in reg]}


def interpolate_constants(build, q_list=(2, 3, 5, 7), degree: int = 12, convention=None) -> InterpolationResult:
    """Fit each class coefficient of build(generators) as a Laurent polynomial in v = eps.

    Classes are grouped by their field-independent type; a type whose
    coefficient is not constant across its classes at some q is a failure.
    Types absent at some q are fitted on the remaining values.
    """
    q_list = tuple(sorted(q_list))
    per_type: dict = {}
    failures: dict = {}
    for q in q_list:
        f = build(context(q, convention))
        for c in _classes_of(f):
            t = c.regular_type()
            v = f.coeffs.get(c, QEps(q))
            seen = per_type.setdefault(t, {})
            if q in seen and seen[q] != v:
                failures[t] = f"coefficient varies within the type at q={q}"
            seen[q] = v
    fits = {}
    for t, vals in sorted(per_type.items(), key=lambda kv: repr(kv[0])):
        if t in failures:
            continue
        even, why_a = fit_laurent({q: v.a for q, v in vals.items()}, degree)
        odd, why_b = fit_laurent({q: v.b for q, v in vals.items()}, degree)
        if even is None or odd is None:
            failures[t] = why_a or why_b
            continue
        fits[t] = LaurentFit(even, odd)
    return InterpolationResult(q_list, fits, failures)


def _classes_of(f: HallElem):
    """All classes in the grades of f (zero coefficients included)."""
    out = []
    for d in f.grades():
        out.extend(kr.enumerate_classes(d, f.q, f.orientation))
    return out


# ---------------------------------------------------------------------------
# suites and negative controls


TWIST_FREE = {"q_identity", "tau_invariance", "counting", "homs", "exts", "fingerprints",
              "regular_expressibility", "theta_norm"}


# individual cases that cannot see the twist: corollary4 at k = l = 1 is the
# definition of phi_1, and Delta(rho_1) only has twist-free diagonal splits
TWIST_FREE_CASES = {("coproduct_rho", '{"k": 1}')}


def _twist_free(check_id: str, params: dict) -> bool:
    if check_id in TWIST_FREE:
        return True
    return (check_id, json.dumps(params, sort_keys=True)) in TWIST_FREE_CASES


def perturbation_for(check_id: str, conv: TwistConvention) -> TwistConvention:
    """The perturbed convention used as negative control for one check."""
    if check_id == "coproduct_rho":
        t = conv.u
        u = tuple(tuple(t[i][j] + (1 if (i, j) == (0, 1) else 0) for j in range(2)) for i in range(2))
        return TwistConvention(conv.factor_order, conv.t, u, conv.divided, conv.tensor)
    return conv.perturbed(0, 1, 1)


def suite(q_list=(2, 3), max_grade=(4, 4), convention=None) -> list:
    """Desk-scale jobs as (label, check id, callable) triples; callables are picklable."""
    conv = {"convention": convention}
    jobs = []

    def add(label, cid, fn, *args, **kw):
        jobs.append((label, cid, partial(fn, *args, **kw)))

    for q in q_list:
        big = 4 if q == 2 else 3
        for i in (0, 1):
            add(f"serre i={i} q={q}", "serre", check_serre, i, q, **conv)
        for n in range(1, big + 1):
            add(f"relation n={n} q={q}", "relation", check_relation, n, q, **conv)
        add(f"pseries N={big} q={q}", "pseries", check_pseries, big, q, **conv)
        for k in range(1, 4):
            for l in range(1, 5 - k):
                add(f"corollary4 k={k} l={l} q={q}", "corollary4", check_corollary4, k, l, q, **conv)
        for r in range(1, 4):
            for s_ in (1, 2):
                add(f"lemma_comm r={r} s={s_} q={q}", "lemma_comm", check_lemma_comm, r, s_, q, **conv)
        for rel in (1, 2, 3, 4, 5):
            for idx in drinfeld_indices(rel, max_grade):
                add(f"drinfeld ({rel}) {idx} q={q}", "drinfeld", check_drinfeld, rel, idx, q, **conv)
        for n in range(1, big + 1):
            for lam in symfun.partitions_of(n):
                add(f"kostka {lam} q={q}", "kostka", check_kostka, lam, q, **conv)
        for k in range(1, 4):
            add(f"coproduct_rho k={k} q={q}", "coproduct_rho", check_coproduct_rho, k, q, **conv)
        for k in (1, 2, 3):
            add(f"tau k={k} q={q}", "tau_invariance", check_tau_invariance, k, q, **conv)
        for n in range(1, 4 if q == 2 else 3):
            add(f"projection n={n} q={q}", "projection", check_projection, n, q, **conv)
        for n in range(1, 3):
            add(f"regular_expressibility n={n} q={q}", "regular_expressibility",
                check_regular_expressibility, n, q, **conv)
        for n in range(1, 5 if q == 2 else 4):
            add(f"counting n={n} q={q}", "counting", check_counting, n, q)
        add(f"homs q={q}", "homs", check_hom_vanishing, q)
        add(f"exts q={q}", "exts", check_ext_vanishing, q)
        for m in range(1, 13):
            add(f"q_identity m={m} q={q}", "q_identity", check_q_identity, m, q)
    return jobs


def run_jobs(jobs, workers: int = 1) -> list:
    """Run (label, id, callable) jobs; results come back in job order."""
    calls = [fn for _, _, fn in jobs]
    if workers <= 1:
        return [fn() for fn in calls]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, calls))


def _call(fn):
    return fn()


def negative_control(check, check_id: str, *args, convention=None, **kwargs) -> CheckReport:
    """Run check under the perturbed twist; the control passes when the check fails."""
    base = convention or DEFAULT_CONVENTION
    rep = check(*args, convention=base, **kwargs) if check_id not in TWIST_FREE else check(*args, **kwargs)
    if _twist_free(check_id, rep.params):
        return CheckReport(f"negative:{check_id}", rep.params, rep.q, "", True, None,
                           note="not applicable: the identity does not involve the twist")
    pert = perturbation_for(check_id, base)
    rep = check(*args, convention=pert, **kwargs)
    return CheckReport(f"negative:{check_id}", rep.params, rep.q, pert.hash, not rep.passed,
                       None if not rep.passed else "check still passes under perturbed twist")
