import itertools
from fractions import Fraction

import pytest

from kronhall import symfun as sf


def test_partitions_small():
    assert sf.partitions_of(0) == [()]
    assert len(sf.partitions_of(4)) == 5
    assert len(sf.partitions_of(6)) == 11 == sf.partition_count_series(6)[6]


def test_partition_counts_against_series():
    series = sf.partition_count_series(15)
    for n in range(16):
        assert len(sf.partitions_of(n)) == series[n]


def test_partitions_order_refines_dominance():
    for n in range(1, 9):
        parts = sf.partitions_of(n)
        for i, j in itertools.combinations(range(len(parts)), 2):
            # a later partition never strictly dominates an earlier one
            assert not (sf.dominance_leq(parts[i], parts[j]) and parts[i] != parts[j])


def test_dominance_examples():
    assert sf.dominance_leq((2, 1), (2, 1))
    assert sf.dominance_leq((1, 1, 1), (3,))
    assert not sf.dominance_leq((3,), (1, 1, 1))
    assert sf.dominance_leq((2, 2), (3, 1))
    assert not sf.dominance_leq((3, 1, 1, 1), (2, 2, 2))
    assert not sf.dominance_leq((2, 2, 2), (3, 1, 1, 1))
    with pytest.raises(ValueError):
        sf.dominance_leq((2,), (1,))


def brute_ssyt(shape, content):
    """Count fillings of the diagram with the given content that are row-weak and column-strict."""
    cells = [(r, c) for r, row in enumerate(shape) for c in range(row)]
    values = [v + 1 for v, m in enumerate(content) for _ in range(m)]
    seen = set()
    for perm in set(itertools.permutations(values)):
        t = dict(zip(cells, perm))
        ok = all(t[(r, c)] <= t[(r, c + 1)] for r, c in cells if (r, c + 1) in t)
        ok = ok and all(t[(r, c)] < t[(r + 1, c)] for r, c in cells if (r + 1, c) in t)
        if ok:
            seen.add(perm)
    return len(seen)


def test_kostka_examples():
    assert sf.kostka((2, 1), (1, 1, 1)) == 2
    for lam in sf.partitions_of(5):
        assert sf.kostka(lam, lam) == 1
    for n in range(1, 8):
        assert sf.kostka((n,), (1,) * n) == 1


def test_kostka_against_brute_force():
    for n in range(1, 6):
        for mu in sf.partitions_of(n):
            for lam in sf.partitions_of(n):
                assert sf.kostka(mu, lam) == brute_ssyt(mu, lam)


def test_kostka_one_column_content_counts_standard_tableaux():
    for mu in sf.partitions_of(6):
        assert sf.kostka(mu, (1,) * 6) == sf.standard_tableaux_count(mu)


def test_ssyt_rows_and_columns():
    for t in sf.ssyt((3, 2), (2, 2, 1)):
        assert all(list(r) == sorted(r) for r in t)
        assert all(t[0][c] < t[1][c] for c in range(len(t[1])))


def test_kostka_matrix_small():
    assert sf.kostka_matrix(1).entries == ((1,),)
    k3 = sf.kostka_matrix(3)
    assert k3.parts == ((3,), (2, 1), (1, 1, 1))
    assert k3.entries == ((1, 1, 1), (0, 1, 2), (0, 0, 1))


@pytest.mark.parametrize("n", range(1, 7))
def test_kostka_matrix_inverse(n):
    k = sf.kostka_matrix(n)
    assert k.is_unitriangular()
    prod = sf.matmul(k.entries, k.inverse())
    m = len(k.parts)
    assert prod == tuple(tuple(Fraction(int(i == j)) for j in range(m)) for i in range(m))
    # zero pattern follows dominance: K[mu, lam] != 0 only if mu dominates lam
    for mu in k.parts:
        for lam in k.parts:
            if k[mu, lam]:
                assert sf.dominance_leq(lam, mu)


def test_bad_partitions():
    with pytest.raises(ValueError):
        sf.kostka((1, 2), (3,))
    with pytest.raises(ValueError):
        sf.partitions_of(21)
