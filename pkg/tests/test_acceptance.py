"""Acceptance criteria 1-12.  Each test records one pass/fail line that is
printed in the terminal summary; all comparisons are exact."""
import itertools
import time
from fractions import Fraction

from kronhall import calibrate as cal
from kronhall import kronrep as kr
from kronhall import symfun as sf
from kronhall import verify as V
from kronhall.kronrep import MINUS

QS = (2, 3)


def failing(reports):
    return [(r.id, r.params, r.q) for r in reports if not r.passed]


def test_01_calibration(record, tmp_path):
    t0 = time.time()
    res = cal.calibrate(QS, cache_dir=tmp_path)
    took = time.time() - t0
    saved = cal.load_calibration(tmp_path)
    ok = (res.conventions and took < 300 and saved is not None
          and saved.conventions == res.conventions
          and all(saved.a3_variants.get(c.hash) for c in res.conventions)
          and all(saved.reports.get(c.hash) for c in res.conventions))
    record(1, ok, f"{len(res.conventions)} survivor(s), {res.conventions[0].hash if res.conventions else '-'}, "
                  f"{took:.0f}s")
    assert ok


def test_02_classification(record):
    t0 = time.time()
    bad = []
    for q in QS:
        for d0 in range(9):
            for d1 in range(9 - d0):
                for c in kr.enumerate_classes((d0, d1), q):
                    if kr.classify(kr.representative(c)) != c:
                        bad.append(("round trip", c))
        for d0, d1 in itertools.product(range(4), repeat=2):
            total = sum(Fraction(kr.group_order((d0, d1), q), kr.aut_order(c))
                        for c in kr.enumerate_classes((d0, d1), q))
            if total != q ** (2 * d0 * d1):
                bad.append(("orbit sum", (d0, d1), q))
    # every one of the 256 points of E_(2,2) over F_2
    seen = {}
    mats = [((a, b), (c, d)) for a, b, c, d in itertools.product(range(2), repeat=4)]
    for x1, x2 in itertools.product(mats, repeat=2):
        c = kr.classify(kr.KronRep.make(2, (2, 2), x1, x2))
        seen[c] = seen.get(c, 0) + 1
    classes = kr.enumerate_classes((2, 2), 2)
    if set(seen) != set(classes) or any(seen[c] != kr.orbit_size(c) for c in classes):
        bad.append(("brute force", (2, 2)))
    took = time.time() - t0
    ok = not bad and took < 120
    record(2, ok, f"{len(seen)} orbits at (2,2), {took:.0f}s" + (f", {bad[:3]}" if bad else ""))
    assert ok


def test_03_hom_ext(record):
    reps = [f(q) for q in QS for f in (V.check_hom_vanishing, V.check_ext_vanishing)]
    record(3, not failing(reps), str(failing(reps) or "all vanishings hold"))
    assert not failing(reps)


def test_04_relation(record):
    t0 = time.time()
    reps = []
    for q, top in ((2, 4), (3, 3)):
        for n in range(1, top + 1):
            reps += [V.check_relation(n, q), V.check_ptilde(n, q)]
    took = time.time() - t0
    ok = not failing(reps) and took < 600
    record(4, ok, f"{len(reps)} checks, {took:.0f}s {failing(reps) or ''}")
    assert ok


def test_05_counting(record):
    reps = [V.check_counting(n, q) for q in QS for n in range(1, 5)]
    record(5, not failing(reps), f"{sum(r.extra['classes'] for r in reps)} regular classes {failing(reps) or ''}")
    assert not failing(reps)


def test_06_corollary_and_commutation(record):
    reps = []
    for q in QS:
        reps += [V.check_corollary4(k, l, q) for k in range(1, 4) for l in range(1, 5 - k)]
        reps += [V.check_lemma_comm(r, s, q) for r in range(0, 4) for s in (1, 2)]
    # exact equality, so the recorded global unit is eps^0
    record(6, not failing(reps), f"{len(reps)} checks, unit eps^0 {failing(reps) or ''}")
    assert not failing(reps)


def test_07_drinfeld(record):
    reps = []
    for q in QS:
        for rel in (1, 3, 5):
            reps += [V.check_drinfeld(rel, idx, q) for idx in V.drinfeld_indices(rel, (4, 4))]
        for rel in (2, 4):
            reps += [V.check_drinfeld(rel, idx, q, orientation=MINUS) for idx in V.drinfeld_indices(rel, (4, 4))]
    reps += [V.check_q_identity(m, 2) for m in range(1, 13)]
    record(7, not failing(reps), f"{len(reps)} checks {failing(reps) or ''}")
    assert not failing(reps)


def test_08_kostka(record):
    reps = [V.check_kostka(lam, q) for q, top in ((2, 4), (3, 3))
            for n in range(1, top + 1) for lam in sf.partitions_of(n)]
    mats_ok = True
    for n in range(1, 7):
        k = sf.kostka_matrix(n)
        m = len(k.parts)
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(m)) for i in range(m))
        mats_ok = mats_ok and k.is_unitriangular() and sf.matmul(k.entries, k.inverse()) == ident
    ok = not failing(reps) and mats_ok
    record(8, ok, f"{len(reps)} partitions, matrices n<=6 {'ok' if mats_ok else 'BAD'} {failing(reps) or ''}")
    assert ok


def test_09_coproduct(record):
    reps = [V.check_coproduct_rho(k, q) for q in QS for k in range(1, 4)]
    record(9, not failing(reps), f"{len(reps)} checks {failing(reps) or ''}")
    assert not failing(reps)


def test_10_projection(record):
    reps = [V.check_projection(n, 2) for n in range(1, 4)]
    reps += [V.check_theta_norm(i, q) for q in (2, 3, 5, 7) for i in (0, 1)]
    record(10, not failing(reps), f"{len(reps)} checks {failing(reps) or ''}")
    assert not failing(reps)


def _words():
    """Ordered gamma/mu words of length 2 or 3 with total grade <= (3, 3)."""
    atoms = [(f"gamma{a}", (a + 1, a)) for a in range(3)] + [(f"mu{b}", (b, b + 1)) for b in range(3)]
    for n in (2, 3):
        for w in itertools.product(atoms, repeat=n):
            d = (sum(a[1][0] for a in w), sum(a[1][1] for a in w))
            if d[0] <= 3 and d[1] <= 3:
                yield "*".join(a[0] for a in w)


def test_11_interpolation(record):
    from kronhall.expr import builder
    bad, held_out, n = [], [], 0
    for text in _words():
        n += 1
        res = V.interpolate_constants(builder(text), (2, 3, 5, 7))
        if not res.ok and all("spare" in why for why in res.failures.values()):
            # four monomials need all four points; q = 11 then serves as the check point
            res = V.interpolate_constants(builder(text), (2, 3, 5, 7, 11))
            held_out.append(text)
        if not (res.ok and res.integral):
            bad.append(text)
    extra = f", q=11 held out for {held_out}" if held_out else ""
    record(11, not bad, f"{n} products integral across q=2,3,5,7{extra} {bad or ''}")
    assert not bad


def test_12_negative_controls(record):
    reps = []
    for label, cid, fn in V.suite((2,), (4, 4)):
        reps.append(V.negative_control(fn.func, cid, *fn.args, **fn.keywords))
    waived = sum("not applicable" in r.note for r in reps)
    fps = [V.check_fingerprints((d0, d1), q) for q in QS
           for d0 in range(5) for d1 in range(5 - d0)]
    ok = not failing(reps) and not failing(fps)
    record(12, ok, f"{len(reps) - waived} controls fail as required, {waived} twist-free N/A, "
                   f"{len(fps)} fingerprint grades {failing(reps) + failing(fps) or ''}")
    assert ok
