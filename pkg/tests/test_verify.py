import json
from fractions import Fraction

import pytest

from kronhall import verify as V
from kronhall.expr import builder
from kronhall.hall import DEFAULT_CONVENTION
from kronhall.qeps import QEps

CONV = DEFAULT_CONVENTION


def passes(rep):
    assert rep.passed, (rep.id, rep.params, rep.note, rep.to_json()["discrepancy"])
    return True


# -- relations

@pytest.mark.parametrize("i,q", [(0, 2), (1, 3)])
def test_serre(i, q):
    passes(V.check_serre(i, q))


def test_serre_corrupted_divided_powers():
    from dataclasses import replace
    bad = replace(CONV, divided=1)
    rep = V.check_serre(0, 2, bad)
    assert not rep.passed and rep.discrepancy is not None


@pytest.mark.parametrize("n,q", [(1, 2), (3, 2), (2, 5)])
def test_relation(n, q):
    passes(V.check_relation(n, q))
    passes(V.check_ptilde(n, q))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_pseries(N):
    passes(V.check_pseries(N, 2))


def test_pseries_n1_agrees_with_relation():
    assert V.check_pseries(1, 2).passed == V.check_relation(1, 2).passed


def test_pseries_printed_orientation_fails_by_sign():
    rep = V.check_pseries(2, 2, reading="printed")
    assert not rep.passed


@pytest.mark.parametrize("k,l,q", [(1, 1, 2), (2, 1, 2), (1, 1, 3)])
def test_corollary4(k, l, q):
    passes(V.check_corollary4(k, l, q))


@pytest.mark.parametrize("r,s,q", [(1, 1, 2), (2, 1, 2), (1, 2, 3)])
def test_lemma_comm(r, s, q):
    passes(V.check_lemma_comm(r, s, q))


# -- Drinfeld relations

def test_drinfeld_examples():
    passes(V.check_drinfeld(1, (1, 0), 2))
    passes(V.check_drinfeld(3, (0, 0), 2))
    passes(V.check_drinfeld(5, (0, 1), 3))


def test_drinfeld_tau_runs():
    from kronhall.kronrep import MINUS
    passes(V.check_drinfeld(2, (1, 1), 2, orientation=MINUS))
    passes(V.check_drinfeld(4, (1, 1), 2, orientation=MINUS))


def test_drinfeld_printed_normalization_is_off_by_a_constant():
    rep = V.check_drinfeld(5, (0, 1), 3, reading="printed")
    assert not rep.passed


def test_drinfeld_indices_respect_grade():
    for rel in (1, 2, 3, 4, 5):
        for idx in V.drinfeld_indices(rel, (4, 4)):
            d = V.drinfeld_grade(rel, idx)
            assert d[0] <= 4 and d[1] <= 4


@pytest.mark.parametrize("m,q", [(1, 2), (5, 2), (12, 3)])
def test_q_identity(m, q):
    passes(V.check_q_identity(m, q))


# -- Kostka, coproduct, projection

@pytest.mark.parametrize("lam", [(1, 1), (2, 1), (3,)])
def test_kostka(lam):
    passes(V.check_kostka(lam, 2))


@pytest.mark.parametrize("k,q", [(1, 2), (2, 2), (2, 3)])
def test_coproduct_rho(k, q):
    passes(V.check_coproduct_rho(k, q))


def test_hopf_defect_vanishes():
    g = V.context(2)
    assert V.hopf_defect(g.alg, g.theta(0), g.theta(1), g.rho(1)).is_zero()


@pytest.mark.parametrize("n", [1, 2])
def test_projection(n):
    passes(V.check_projection(n, 2))


def test_theta_norm():
    for q in (2, 3, 5):
        passes(V.check_theta_norm(0, q))
        passes(V.check_theta_norm(1, q))


def test_solve_in_span():
    q = 2
    one = QEps(q, 1)
    vecs = [{"a": one, "b": one}, {"b": one}]
    coeffs = V.solve_in_span(vecs, {"a": QEps(q, 2), "b": QEps(q, 5)}, q)
    assert coeffs == [QEps(q, 2), QEps(q, 3)]
    assert V.solve_in_span(vecs, {"c": one}, q) is None


# -- structural checks

@pytest.mark.parametrize("n", [1, 2])
def test_regular_expressibility(n):
    passes(V.check_regular_expressibility(n, 2))


def test_gamma_order_and_orbits():
    g = V.context(2)
    # I_1 and I_2 have no extensions either way, so both orders give a single orbit
    for a, b in ((1, 0), (0, 1)):
        assert V._orbit_multiple(g.alg.product(g.gamma(a), g.gamma(b))) is not None
    # Ext(I_1, I_3) != 0: only the decreasing order (quotient I_3) stays on one orbit
    dec = g.alg.product(g.gamma(2), g.gamma(0))
    inc = g.alg.product(g.gamma(0), g.gamma(2))
    assert V._orbit_multiple(dec) is not None
    assert V._orbit_multiple(inc) is None


@pytest.mark.parametrize("k,q", [(1, 2), (2, 2), (2, 3)])
def test_tau_invariance(k, q):
    passes(V.check_tau_invariance(k, q))


@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (3, 2), (2, 3)])
def test_counting(n, q):
    rep = V.check_counting(n, q)
    passes(rep)


def test_hom_ext_fingerprints():
    passes(V.check_hom_vanishing(2))
    passes(V.check_ext_vanishing(3))
    passes(V.check_fingerprints((2, 2), 3))


# -- interpolation

def test_interpolate_mu1_mu0():
    res = V.interpolate_constants(builder("mu1*mu0"), (2, 3, 5, 7))
    assert res.ok and res.integral
    dense = [f for t, f in res.fits.items() if t == (((1, 1), (2, 1)), (), ())]
    assert [str(f) for f in dense] == ["1*v^-4"]


def test_interpolate_rho1():
    res = V.interpolate_constants(builder("rho1"), (2, 3, 5))
    regular = [f for t, f in res.fits.items() if t[2]]
    assert regular and all(f.to_json() == {"-2": "1"} for f in regular)


def test_interpolate_insufficient_points():
    res = V.interpolate_constants(builder("mu1*mu0"), (2,))
    assert not res.ok
    assert all("validation" in r for r in res.failures.values())


def test_fit_laurent_exact():
    poly = {q: Fraction(q * q + q + 1, q ** 5) for q in (2, 3, 5, 7)}
    coeffs, why = V.fit_laurent(poly, 12)
    assert why is None and coeffs == {-5: 1, -4: 1, -3: 1}
    bad = {2: Fraction(1, 3), 3: Fraction(1, 5), 5: Fraction(2, 7)}
    assert V.fit_laurent(bad, 2)[0] is None


# -- reports, determinism, controls

def test_report_json_schema():
    rep = V.check_relation(2, 2)
    obj = rep.to_json()
    assert {"id", "params", "q", "convention", "pass", "discrepancy"} <= set(obj)
    json.dumps(obj)


def test_failing_report_carries_exact_discrepancy():
    rep = V.check_relation(2, 2, CONV.perturbed())
    assert not rep.passed
    assert rep.discrepancy is not None and not rep.discrepancy.is_zero()


def test_reports_are_deterministic():
    a = V.check_corollary4(2, 1, 2).to_json()
    V._CONTEXTS.clear()
    b = V.check_corollary4(2, 1, 2).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_parallel_run_matches_serial():
    jobs = [j for j in V.suite((2,), (2, 2)) if j[1] in ("relation", "kostka", "q_identity")][:8]
    serial = [r.to_json() for r in V.run_jobs(jobs, 1)]
    parallel = [r.to_json() for r in V.run_jobs(jobs, 2)]
    assert serial == parallel


@pytest.mark.parametrize("check,cid,args", [
    (V.check_relation, "relation", (3, 2)),
    (V.check_corollary4, "corollary4", (2, 1, 2)),
    (V.check_lemma_comm, "lemma_comm", (1, 1, 2)),
    (V.check_serre, "serre", (0, 2)),
    (V.check_kostka, "kostka", ((2, 1), 2)),
    (V.check_coproduct_rho, "coproduct_rho", (2, 2)),
    (V.check_projection, "projection", (2, 2)),
])
def test_negative_controls(check, cid, args):
    rep = V.negative_control(check, cid, *args)
    assert rep.passed and "not applicable" not in rep.note


def test_negative_control_waivers():
    rep = V.negative_control(V.check_q_identity, "q_identity", 3, 2)
    assert rep.passed and "not applicable" in rep.note
    rep = V.negative_control(V.check_coproduct_rho, "coproduct_rho", 1, 2)
    assert "not applicable" in rep.note


@pytest.mark.parametrize("k", [1, 2, 3])
def test_corollary4_with_l1_is_not_vacuous(k):
    rep = V.negative_control(V.check_corollary4, "corollary4", k, 1, 2)
    assert rep.passed and "not applicable" not in rep.note
