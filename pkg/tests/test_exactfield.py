import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kronhall import exactfield as ef
from kronhall.exactfield import BinaryFormFq, ClosedPoint, Fq, MatrixFq

PRIMES = st.sampled_from([2, 3, 5, 7, 11])


def all_vectors(n, p):
    return itertools.product(range(p), repeat=n)


# -- field elements

@given(PRIMES, st.integers(), st.integers(), st.integers())
def test_ring_axioms(p, a, b, c):
    x, y, z = Fq(p, a), Fq(p, b), Fq(p, c)
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + Fq(p, 0) == x
    assert x * Fq(p, 1) == x


@given(PRIMES, st.integers(min_value=1))
def test_inverse(p, a):
    if a % p == 0:
        return
    x = Fq(p, a)
    assert x * x.inverse() == Fq(p, 1)


def test_field_mismatch():
    with pytest.raises(ef.FieldMismatch):
        Fq(2, 1) + Fq(3, 1)
    with pytest.raises(ValueError):
        Fq(4, 1)


# -- kernels

def test_kernel_of_zero_matrix():
    assert len(ef.solve_kernel(((0, 0), (0, 0)), 2)) == 2


def test_kernel_of_identity():
    assert ef.solve_kernel(ef.identity(3), 3) == ()


def test_kernel_all_ones_f2():
    ker = ef.solve_kernel(((1, 1), (1, 1)), 2)
    assert [tuple(v) for v in ker] == [(1, 1)]
    # brute force over all 4 vectors
    brute = [v for v in all_vectors(2, 2) if all(sum(a * b for a, b in zip(r, v)) % 2 == 0 for r in ((1, 1), (1, 1)))]
    assert sorted(brute) == [(0, 0), (1, 1)]


matrices = PRIMES.flatmap(lambda p: st.tuples(
    st.just(p), st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda t: st.tuples(st.just(t[0]), st.just(t[2]), st.lists(
        st.lists(st.integers(0, t[0] - 1), min_size=t[2], max_size=t[2]), min_size=t[1], max_size=t[1]))))


@settings(max_examples=200)
@given(matrices)
def test_rank_nullity(data):
    p, cols, rows = data
    m = MatrixFq.from_rows(p, rows, cols)
    ker = m.kernel()
    assert m.rank() + len(ker) == cols
    for v in ker:
        assert not any(m.apply(v))


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_kernel_matches_brute_force_f3(seed):
    import random
    rnd = random.Random(seed)
    rows = [[rnd.randrange(3) for _ in range(3)] for _ in range(2)]
    ker = ef.SubspaceFq.span(3, 3, ef.solve_kernel(rows, 3, 3))
    brute = [v for v in all_vectors(3, 3) if all(sum(a * b for a, b in zip(r, v)) % 3 == 0 for r in rows)]
    assert len(brute) == 3 ** ker.dim
    assert all(ker.contains(v) for v in brute)


# -- subspaces

def test_lines_in_f2_squared():
    assert len(ef.enumerate_subspaces(2, 1, 2)) == 3


def test_zero_subspace():
    for n in range(4):
        subs = ef.enumerate_subspaces(n, 0, 3)
        assert len(subs) == 1 and subs[0].dim == 0


def test_planes_in_f2_4_brute_force():
    subs = ef.enumerate_subspaces(4, 2, 2)
    assert len(subs) == 35
    # brute force: distinct spans of all pairs of vectors
    spans = set()
    for u, v in itertools.combinations(all_vectors(4, 2), 2):
        s = ef.SubspaceFq.span(2, 4, [u, v])
        if s.dim == 2:
            spans.add(s.basis)
    assert spans == {s.basis for s in subs}


def test_enumerate_rejects_k_above_n():
    with pytest.raises(ValueError):
        ef.enumerate_subspaces(2, 3, 2)


def gaussian_product(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


@pytest.mark.parametrize("q", [2, 3, 5])
def test_subspace_counts_equal_gaussian_binomials(q):
    for n in range(6):
        for k in range(n + 1):
            if q ** (k * (n - k)) > 20000:
                continue
            subs = ef.enumerate_subspaces(n, k, q)
            assert len(subs) == gaussian_product(n, k, q) == ef.gaussian_binomial(n, k, q)
            assert len({s.basis for s in subs}) == len(subs)


def test_echelon_form_is_canonical():
    a = ef.SubspaceFq.span(3, 3, [(1, 2, 0), (0, 1, 1)])
    b = ef.SubspaceFq.span(3, 3, [(1, 0, 1), (1, 1, 2)])
    assert a.basis == b.basis


# -- polynomials and binary forms

def test_irreducibles_f2():
    assert ef.irreducibles_up_to(1, 2) == [(0, 1), (1, 1)]
    assert ef.irreducibles_up_to(2, 2)[2:] == [(1, 1, 1)]
    assert sorted(ef.irreducibles_up_to(3, 2)[3:]) == sorted([(1, 1, 0, 1), (1, 0, 1, 1)])


def necklace(d, q):
    # brute-force count of monic irreducibles: monic polys with no monic factor of lower degree
    count = 0
    for tail in itertools.product(range(q), repeat=d):
        f = tuple(tail) + (1,)
        if ef.verify_irreducible(f, q):
            count += 1
    return count


@pytest.mark.parametrize("q,d", [(2, 4), (3, 3), (5, 2)])
def test_irreducible_counts(q, d):
    assert len(ef.irreducibles_of_degree(d, q)) == necklace(d, q)
    moebius = {1: 1, 2: -1, 3: -1, 4: 0}
    assert len(ef.irreducibles_of_degree(d, q)) == sum(
        moebius[d // e] * q ** e for e in range(1, d + 1) if d % e == 0) // d


def test_factor_lambda_mu():
    f = BinaryFormFq(2, 2, (0, 1, 0))
    assert ef.factor_binary_form(f) == sorted([(ClosedPoint.finite((0, 1)), 1), (ClosedPoint.infinity(), 1)])


def test_factor_mu_power():
    assert ef.factor_binary_form(BinaryFormFq(3, 4, (1, 0, 0, 0, 0))) == [(ClosedPoint.infinity(), 4)]


def test_factor_irreducible_quadratic():
    assert ef.factor_binary_form(BinaryFormFq(2, 2, (1, 1, 1))) == [(ClosedPoint.finite((1, 1, 1)), 1)]


def test_factor_zero_form_rejected():
    with pytest.raises(ValueError):
        ef.factor_binary_form(BinaryFormFq(2, 1, (0, 0)))


def proportional(a, b, p):
    return any(tuple(c * s % p for c in a) == b for s in range(1, p))


@settings(max_examples=200)
@given(PRIMES, st.integers(1, 6), st.data())
def test_factor_reconstruct(p, deg, data):
    coeffs = tuple(data.draw(st.lists(st.integers(0, p - 1), min_size=deg + 1, max_size=deg + 1)))
    if not any(coeffs):
        return
    form = BinaryFormFq(p, deg, coeffs)
    factors = ef.factor_binary_form(form)
    assert sum(pt.degree * m for pt, m in factors) == deg
    assert all(pt.is_infinity or ef.verify_irreducible(pt.poly, p) for pt, _ in factors)
    assert proportional(ef.reconstruct_form(factors, p).coeffs, coeffs, p)


def test_pencil_determinant_identity():
    det = ef.pencil_determinant(ef.identity(2), ef.identity(2), 2)
    # (lambda + mu)^2 over F_2 = lambda^2 + mu^2
    assert det.coeffs == (1, 0, 1)
