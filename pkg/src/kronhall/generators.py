"""Named Hall elements.

Indexing is by dimension vector and 0-based: Gamma(k) lives in grade (k+1, k),
Mu(k) in (k, k+1), so Gamma(0) = theta_0 and Mu(0) = theta_1.  The dense-orbit
element the literature writes gamma_k (grade (k, k-1)) is Gamma(k-1) here, and
likewise mu_k is Mu(k-1).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .hall import HallAlgebra, HallElem
from .kronrep import IndecompLabel, IsoClass
from .qeps import QEps, qint


@dataclass(frozen=True)
class NamedElement:
    tag: str
    args: tuple
    q: int
    element: HallElem
    convention_hash: str = ""

    @property
    def dims(self):
        g = self.element.grades()
        return g[0] if len(g) == 1 else None

    def to_json(self) -> dict:
        return {"tag": self.tag, "args": list(self.args), "q": self.q,
                "convention": self.convention_hash, "element": self.element.to_json()}


def _sign(perm) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


class Generators:
    """Constructors for one algebra (field + convention), memoized."""

    def __init__(self, algebra: HallAlgebra):
        self.alg = algebra
        self.q = algebra.q
        self._memo: dict = {}

    def _cached(self, key, build):
        if key not in self._memo:
            self._memo[key] = build()
        return self._memo[key]

    def e(self, k) -> QEps:
        return self.alg.eps(k)

    # generators of the algebra
    def theta(self, i: int) -> HallElem:
        return self._cached(("theta", i), lambda: self.alg.theta(i))

    def theta_div(self, i: int, k: int) -> HallElem:
        return self._cached(("theta_div", i, k), lambda: self.alg.theta_divided(i, k))

    # real root vectors
    def gamma(self, k: int) -> HallElem:
        """eps^(-dim E) times the dense orbit of grade (k+1, k), i.e. the class of I_(k+1)."""
        if k < 0:
            raise ValueError("gamma index must be >= 0")
        return self._cached(("gamma", k), lambda: HallElem.indicator(
            IsoClass.from_labels(self.q, [IndecompLabel.preinj(k + 1)])).scale(self.e(-2 * k * (k + 1))))

    def mu(self, k: int) -> HallElem:
        """eps^(-dim E) times the dense orbit of grade (k, k+1), i.e. the class of P_(k+1)."""
        if k < 0:
            raise ValueError("mu index must be >= 0")
        return self._cached(("mu", k), lambda: HallElem.indicator(
            IsoClass.from_labels(self.q, [IndecompLabel.preproj(k + 1)])).scale(self.e(-2 * k * (k + 1))))

    # imaginary part
    def rho(self, k: int) -> HallElem:
        if k < 0:
            return HallElem.zero(self.q)
        if k == 0:
            return self.alg.unit()
        return self._cached(("rho", k), lambda: HallElem.constant(
            self.q, (k, k), self.e(-2 * k * k), predicate=lambda c: c.is_regular))

    def phi(self, k: int) -> HallElem:
        """Gamma(k-1) theta_1 - eps^-2 theta_1 Gamma(k-1), grade (k, k)."""
        if k < 1:
            raise ValueError("phi index must be >= 1")
        return self._cached(("phi", k), lambda: self.alg.commutator(
            self.gamma(k - 1), self.theta(1), self.e(-2)))

    def ptilde(self, k: int) -> HallElem:
        """P_k = (1/[k]) sum_{r=1}^k eps^(r-k) phi_r P_(k-r), P_0 = 1."""
        if k == 0:
            return self.alg.unit()

        def build():
            total = HallElem.zero(self.q)
            for r in range(1, k + 1):
                total = total + self.alg.product(self.phi(r), self.ptilde(k - r)).scale(self.e(r - k))
            return total.scale(qint(k, self.q).inverse())
        return self._cached(("ptilde", k), build)

    def eta(self, k: int) -> HallElem:
        """Solved from k rho_k = sum_{s=1}^k (s/[s]) eta_s rho_(k-s)."""
        if k < 1:
            raise ValueError("eta index must be >= 1")

        def build():
            rest = self.rho(k).scale(k)
            for s in range(1, k):
                w = QEps(self.q, s) / qint(s, self.q)
                rest = rest - self.alg.product(self.eta(s), self.rho(k - s)).scale(w)
            return rest.scale(qint(k, self.q) / k)
        return self._cached(("eta", k), build)

    def rho_product(self, parts) -> HallElem:
        out = self.alg.unit()
        for p in parts:
            out = self.alg.product(out, self.rho(p))
        return out

    def schur(self, lam) -> HallElem:
        """Jacobi-Trudi determinant det(rho_(lam_i - i + j))."""
        lam = tuple(p for p in lam if p)
        key = ("schur", lam)
        if key in self._memo:
            return self._memo[key]
        n = len(lam)
        if n == 0:
            return self.alg.unit()
        total = HallElem.zero(self.q)
        for perm in itertools.permutations(range(n)):
            idx = [lam[i] - i + perm[i] for i in range(n)]
            if any(k < 0 for k in idx):
                continue
            # the rho's commute, so the factor order is immaterial
            total = total + self.rho_product(sorted(idx, reverse=True)).scale(_sign(perm))
        self._memo[key] = total
        return total

    # ordered products of real root vectors
    def flag_monomial(self, lam) -> HallElem:
        """theta_0^(l1) theta_1^(l1) ... theta_0^(lp) theta_1^(lp)."""
        out = self.alg.unit()
        for p in lam:
            out = self.alg.mul(out, self.theta_div(0, p), self.theta_div(1, p))
        return out

    def named(self, tag: str, *args) -> NamedElement:
        table = {
            "Theta": self.theta, "ThetaDiv": self.theta_div, "Gamma": self.gamma, "Mu": self.mu,
            "Rho": self.rho, "Phi": self.phi, "Ptilde": self.ptilde, "Eta": self.eta,
            "Schur": lambda *lam: self.schur(lam),
        }
        if tag not in table:
            raise KeyError(f"unknown element {tag!r}")
        return NamedElement(tag, args, self.q, table[tag](*args), self.alg.convention.hash)


def declared_grade(tag: str, *args):
    """Grade each named element is supposed to live in."""
    if tag == "Theta":
        return (1, 0) if args[0] == 0 else (0, 1)
    if tag == "ThetaDiv":
        i, k = args
        return (k, 0) if i == 0 else (0, k)
    if tag == "Gamma":
        return (args[0] + 1, args[0])
    if tag == "Mu":
        return (args[0], args[0] + 1)
    if tag in ("Rho", "Phi", "Ptilde", "Eta"):
        return (args[0], args[0])
    if tag == "Schur":
        n = sum(args)
        return (n, n)
    raise KeyError(tag)
