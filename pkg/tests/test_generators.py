import pytest

from kronhall import kronrep as kr
from kronhall.generators import Generators, declared_grade
from kronhall.hall import HallAlgebra, HallElem
from kronhall.kronrep import IndecompLabel as L, IsoClass
from kronhall.qeps import QEps, qint


@pytest.fixture(scope="module")
def g2():
    return Generators(HallAlgebra(2))


@pytest.fixture(scope="module")
def g3():
    return Generators(HallAlgebra(3))


def test_gamma_mu_base_cases(g2):
    assert g2.gamma(0) == g2.theta(0)
    assert g2.mu(0) == g2.theta(1)


def test_gamma1_f2(g2):
    # dim E = 2*2*1 = 4, so the coefficient is eps^-4 = 1/4
    target = IsoClass.from_labels(2, [L.preinj(2)])
    assert g2.gamma(1) == HallElem.indicator(target, QEps(2, 1, 0) / 4)


def test_rho_examples(g2):
    assert g2.rho(0) == g2.alg.unit()
    r1 = g2.rho(1)
    assert len(r1.support()) == 3
    assert all(v == QEps(2, 1) / 2 for v in r1.coeffs.values())
    zero_class = IsoClass.from_labels(2, [L.preproj(1), L.preinj(1)])
    assert r1.coefficient(zero_class) == QEps(2)
    regular_22 = [c for c in kr.enumerate_classes((2, 2), 2) if c.is_regular]
    assert set(g2.rho(2).support()) == set(regular_22)
    assert all(v == QEps(2, 1) / 16 for v in g2.rho(2).coeffs.values())


def test_phi1(g2):
    alg = g2.alg
    t0, t1 = g2.theta(0), g2.theta(1)
    expected = alg.product(t0, t1) - alg.product(t1, t0).scale(g2.e(-2))
    assert g2.phi(1) == expected
    assert g2.phi(1).is_regular_supported()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_phi_regular_supported(g2, k):
    assert g2.phi(k).is_regular_supported()
    assert g2.phi(k).grades() == [(k, k)]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_discarded_term_vanishes_on_regular(g2, k):
    assert g2.alg.product(g2.theta(1), g2.gamma(k - 1)).restrict_regular().is_zero()


def test_phi_is_restriction(g2):
    for k in (1, 2, 3):
        assert g2.alg.product(g2.gamma(k - 1), g2.theta(1)).restrict_regular() == g2.phi(k)


def test_ptilde(g2, g3):
    for g in (g2, g3):
        assert g.ptilde(0) == g.alg.unit()
        assert g.ptilde(1) == g.phi(1) == g.rho(1)
        assert g.ptilde(3) == g.rho(3)


def test_eta(g2, g3):
    assert g2.eta(1) == g2.rho(1)
    # 2 rho_2 = eta_1 rho_1 + (2/[2]) eta_2
    for g in (g2, g3):
        lhs = g.rho(2).scale(2)
        rhs = g.alg.product(g.eta(1), g.rho(1)) + g.eta(2).scale(QEps(g.q, 2) / qint(2, g.q))
        assert lhs == rhs
    for k in range(1, 5):
        assert g2.eta(k).is_regular_supported()


def test_schur(g2):
    assert g2.schur((2,)) == g2.rho(2)
    assert g2.schur((1, 1)) == g2.alg.product(g2.rho(1), g2.rho(1)) - g2.rho(2)
    assert g2.schur(()) == g2.alg.unit()


def test_declared_grades(g2):
    cases = [("Theta", 0), ("Theta", 1), ("ThetaDiv", 1, 2), ("Gamma", 2), ("Mu", 1), ("Rho", 2),
             ("Phi", 2), ("Ptilde", 2), ("Eta", 2), ("Schur", 2, 1)]
    for tag, *args in cases:
        el = g2.named(tag, *args)
        assert el.element.grades() == [declared_grade(tag, *args)]
        assert el.dims == declared_grade(tag, *args)


def test_bad_indices(g2):
    with pytest.raises(ValueError):
        g2.gamma(-1)
    with pytest.raises(ValueError):
        g2.phi(0)
    with pytest.raises(KeyError):
        g2.named("Nope", 1)
