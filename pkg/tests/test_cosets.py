"""Coset labels, the double-coset classifier, orbits, stabilizers."""

import random

import pytest

from kronzeta.cosets import (
    StabilizerDescription,
    classify_double_coset,
    coset_label,
    enumerate_orbits,
    label_rank,
    stabilizer_bruteforce,
    stabilizer_predicted,
    verify_orbit_lemma,
    verify_tensor_inv_lemma,
)
from kronzeta.errors import BudgetExceeded, SingularMatrix
from kronzeta.matgroup import (
    ExactMatrix,
    epsilon_rep,
    kronecker,
    random_invertible,
    unipotent_rep,
    weyl_rep,
)
from kronzeta.rings import QQ, PrimeField


def _random_mirabolic(ring, size, rng):
    """Random block upper-triangular element with 1x1 lower corner."""
    while True:
        rows = []
        for i in range(size - 1):
            rows.append([ring.of(rng.randrange(ring.q)) for _ in range(size)])
        corner = rng.randrange(1, ring.q)
        rows.append([ring.zero] * (size - 1) + [ring.of(corner)])
        mat = ExactMatrix(ring, rows)
        if mat.is_invertible():
            return mat


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------


def test_label_of_identity():
    f = PrimeField(3)
    label = coset_label(ExactMatrix.identity(f, 4))
    assert label == (f.zero, f.zero, f.zero, f.one)


def test_label_of_epsilon_top_rank():
    f = PrimeField(2)
    m, n = 3, 2
    eps = epsilon_rep(f, m, n, n - 1)
    label = coset_label(eps)
    # (0 blocks) then e_n, e_{n-1}, ..., e_1 read off the representative row
    expected = (0, 0, 0, 1, 1, 0)
    assert tuple(x.residue for x in label) == expected
    assert label_rank(label, m, n, f) == n


def test_label_invariant_under_parabolic():
    rng = random.Random(0)
    f = PrimeField(3)
    for _ in range(40):
        g = random_invertible(f, 4, rng)
        p = _random_mirabolic(f, 4, rng)
        assert coset_label(p * g) == coset_label(g)


def test_label_of_singular_matrix_rejected():
    with pytest.raises(SingularMatrix):
        coset_label(ExactMatrix.zeros(QQ, 2, 2) + ExactMatrix.zeros(QQ, 2, 2))


# ---------------------------------------------------------------------------
# Classifier
# ---------------------------------------------------------------------------


def test_classify_identity():
    f = PrimeField(3)
    assert classify_double_coset(ExactMatrix.identity(f, 4), 2, 2).r == 0


@pytest.mark.parametrize("m,n,q", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (3, 3, 2)])
def test_classify_epsilon_reps(m, n, q):
    f = PrimeField(q)
    for r in range(n):
        cls = classify_double_coset(epsilon_rep(f, m, n, r), m, n)
        assert cls.r == r


def test_classify_constructed_input_round_trip():
    # g assembled from random factors p * eps_1 * t(h, g') over F_3 must be
    # classified as r = 1 with a witness reproducing it exactly
    rng = random.Random(1)
    f = PrimeField(3)
    m = n = 2
    for _ in range(20):
        p = _random_mirabolic(f, 4, rng)
        h = random_invertible(f, 2, rng)
        gp = random_invertible(f, 2, rng)
        g = p * epsilon_rep(f, m, n, 1) * kronecker(h, gp)
        cls = classify_double_coset(g, m, n)
        assert cls.r == 1
        pw, hw, gw = cls.witness
        assert pw * epsilon_rep(f, m, n, 1) * kronecker(hw, gw) == g


@pytest.mark.parametrize("m,n,q", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (3, 3, 2)])
def test_classify_random_witnesses(m, n, q):
    rng = random.Random(m * 100 + n * 10 + q)
    f = PrimeField(q)
    for _ in range(8):
        g = random_invertible(f, m * n, rng)
        cls = classify_double_coset(g, m, n)
        pw, hw, gw = cls.witness
        assert pw * epsilon_rep(f, m, n, cls.r) * kronecker(hw, gw) == g


def test_classify_over_rationals():
    rng = random.Random(2)
    for m, n in ((2, 2), (3, 2)):
        for _ in range(5):
            g = random_invertible(QQ, m * n, rng)
            cls = classify_double_coset(g, m, n)
            pw, hw, gw = cls.witness
            assert pw * epsilon_rep(QQ, m, n, cls.r) * kronecker(hw, gw) == g


def test_classify_constant_on_orbits():
    rng = random.Random(3)
    f = PrimeField(2)
    m, n = 3, 2
    for _ in range(15):
        g = random_invertible(f, 6, rng)
        base = classify_double_coset(g, m, n, with_witness=False).r
        h = random_invertible(f, m, rng)
        gp = random_invertible(f, n, rng)
        p = _random_mirabolic(f, 6, rng)
        moved = p * g * kronecker(h, gp)
        assert classify_double_coset(moved, m, n, with_witness=False).r == base


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------


def test_orbit_sizes_2_2_2():
    table = enumerate_orbits(2, 2, 2)
    assert table.points == 15
    assert sorted(table.sizes) == [6, 9]
    by_rank = {row.rank: row.size for row in table.orbits}
    assert by_rank == {1: 9, 2: 6}


def test_orbit_sizes_3_2_2():
    table = enumerate_orbits(3, 2, 2)
    assert table.points == 63
    assert {row.rank: row.size for row in table.orbits} == {1: 21, 2: 42}


@pytest.mark.parametrize(
    "m,n,q", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (3, 3, 2), (2, 3, 2)]
)
def test_orbit_count_is_min(m, n, q):
    table = enumerate_orbits(m, n, q)
    assert len(table.orbits) == min(m, n)
    assert sum(table.sizes) == table.points


def test_epsilon_reps_in_distinct_orbits():
    for m, n, q in ((2, 2, 2), (3, 2, 2), (3, 3, 2), (2, 2, 3)):
        table = enumerate_orbits(m, n, q)
        covered = sorted(r for row in table.orbits for r in row.epsilon_ranks)
        assert covered == list(range(n))
        holders = [row for row in table.orbits if row.epsilon_ranks]
        assert len(holders) == n
        for row in holders:
            assert len(row.epsilon_ranks) == 1
            # eps_r sits in the rank r+1 stratum
            assert row.rank == row.epsilon_ranks[0] + 1


def test_orbit_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_orbits(3, 3, 5, budget=10)


# ---------------------------------------------------------------------------
# Stabilizers
# ---------------------------------------------------------------------------


def test_stabilizer_2_2_1_2_example():
    brute = stabilizer_bruteforce(2, 2, 1, 2)
    assert len(brute) == 6
    assert brute == stabilizer_predicted(2, 2, 1, 2)


def test_stabilizer_2_2_0_2_matches_predicate():
    brute = stabilizer_bruteforce(2, 2, 0, 2)
    assert brute == stabilizer_predicted(2, 2, 0, 2)


@pytest.mark.parametrize("m,n,q", [(2, 2, 2), (2, 2, 3), (3, 2, 2)])
def test_stabilizer_equality(m, n, q):
    for r in range(n):
        assert stabilizer_bruteforce(m, n, r, q) == stabilizer_predicted(m, n, r, q)


def test_identity_pair_always_in_stabilizer():
    f = PrimeField(3)
    desc = StabilizerDescription(2, 2, 1)
    assert desc.contains(ExactMatrix.identity(f, 2), ExactMatrix.identity(f, 2))
    tensor = kronecker(ExactMatrix.identity(f, 2), ExactMatrix.identity(f, 2))
    assert tensor in stabilizer_bruteforce(2, 2, 1, 3)


def test_stabilizer_description_agrees_with_bruteforce():
    from kronzeta.cosets import _all_invertible

    m, n, q = 2, 2, 2
    for r in range(n):
        desc = StabilizerDescription(m, n, r)
        brute = stabilizer_bruteforce(m, n, r, q)
        for h in _all_invertible(m, q):
            for g in _all_invertible(n, q):
                assert desc.contains(h, g) == (kronecker(h, g) in brute)


def test_stabilizer_budget():
    with pytest.raises(BudgetExceeded):
        stabilizer_bruteforce(3, 3, 1, 5, budget=100)


# ---------------------------------------------------------------------------
# Lemma verifiers
# ---------------------------------------------------------------------------


def test_orbit_lemma_identity_case():
    f = PrimeField(3)
    m, n = 2, 2
    w1 = weyl_rep(f, 1, 4)
    rgrid = [[1, 2], [0, 1]]
    flat = [x for row in rgrid for x in row]
    u = unipotent_rep(f, 1, flat[1:])
    id_pair = kronecker(ExactMatrix.identity(f, 2), ExactMatrix.identity(f, 2))
    assert coset_label(w1 * u * id_pair) == coset_label(w1 * u)


@pytest.mark.parametrize("m,n,q", [(2, 2, 3), (3, 2, 2)])
def test_orbit_lemma_random(m, n, q):
    rng = random.Random(40 + q)
    assert verify_orbit_lemma(m, n, q, trials=200, rng=rng)


def test_tensor_lemma_2_2_full_sweep():
    assert verify_tensor_inv_lemma(2, 2)


def test_tensor_lemma_budget():
    with pytest.raises(BudgetExceeded):
        verify_tensor_inv_lemma(3, 3, budget=10**6)
