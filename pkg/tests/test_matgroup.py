"""Matrix builders, Kronecker identities, modulus characters."""

import random
from fractions import Fraction

import pytest

from kronzeta.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotInParabolic,
    RankOutOfRange,
    RingMismatch,
)
from kronzeta.matgroup import (
    ExactMatrix,
    ParabolicShape,
    StarContext,
    ValuationContext,
    abs_rational,
    antidiagonal,
    epsilon_rep,
    kronecker,
    matrix_from_json,
    matrix_to_json,
    modulus_character,
    random_invertible,
    star_plain,
    unipotent_rep,
    verify_modulus_compatibility,
    weyl_rep,
)
from kronzeta.rings import QQ, PrimeField


def _rings():
    return [QQ, PrimeField(2), PrimeField(3), PrimeField(5)]


# ---------------------------------------------------------------------------
# Kronecker product
# ---------------------------------------------------------------------------


def test_kron_identity():
    i2 = ExactMatrix.identity(QQ, 2)
    assert kronecker(i2, i2).is_identity()


def test_kron_block_antidiagonal():
    swap = ExactMatrix(QQ, [[0, 1], [1, 0]])
    i2 = ExactMatrix.identity(QQ, 2)
    expected = ExactMatrix(
        QQ,
        [
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
        ],
    )
    assert kronecker(swap, i2) == expected


def test_kron_diagonal_example():
    h = ExactMatrix.diagonal(QQ, [2, 3])
    g = ExactMatrix.diagonal(QQ, [5, 7])
    t = kronecker(h, g)
    assert t == ExactMatrix.diagonal(QQ, [10, 14, 15, 21])
    assert t.det() == Fraction(44100)


def test_kron_shape_and_ring_errors():
    with pytest.raises(DimensionMismatch):
        kronecker(ExactMatrix(QQ, [[1, 2]]), ExactMatrix.identity(QQ, 2))
    with pytest.raises(RingMismatch):
        kronecker(ExactMatrix.identity(QQ, 2), ExactMatrix.identity(PrimeField(3), 2))


def test_kron_laws_randomized():
    rng = random.Random(10)
    for _ in range(40):
        ring = rng.choice(_rings())
        m, n = rng.choice(((2, 2), (2, 3), (3, 2)))
        h = random_invertible(ring, m, rng)
        g = random_invertible(ring, n, rng)
        t = kronecker(h, g)
        id_m = ExactMatrix.identity(ring, m)
        id_n = ExactMatrix.identity(ring, n)
        assert t == kronecker(h, id_n) * kronecker(id_m, g)
        assert t == kronecker(id_m, g) * kronecker(h, id_n)
        assert t.transpose() == kronecker(h.transpose(), g.transpose())
        assert t.det() == h.det() ** n * g.det() ** m
        assert star_plain(t) == kronecker(star_plain(h), star_plain(g))


@pytest.mark.parametrize("q", [2, 3])
def test_kron_kernel_exhaustive(q):
    # t(h, g) = I forces h scalar with g its inverse scale: iterate h alone,
    # since the off-diagonal blocks h_ij * g vanish only when h_ij does
    field = PrimeField(q)
    for m, n in ((2, 2), (2, 3), (3, 2), (3, 3)):
        scalar_pairs = set()
        for lam in range(1, q):
            h = ExactMatrix.diagonal(field, [lam] * m)
            g = ExactMatrix.diagonal(field, [pow(lam, q - 2, q)] * n)
            assert kronecker(h, g).is_identity()
            scalar_pairs.add((h, g))
        # any h with an off-diagonal entry or non-constant diagonal fails
        rng = random.Random(q * 100 + m * 10 + n)
        for _ in range(50):
            h = random_invertible(field, m, rng)
            is_scalar = all(
                h.entries[i][j] == (h.entries[0][0] if i == j else field.zero)
                for i in range(m)
                for j in range(m)
            )
            if is_scalar:
                continue
            lam = h.entries[0][0]
            solvable = all(
                field.is_zero(h.entries[i][j])
                for i in range(m)
                for j in range(m)
                if i != j
            )
            assert not solvable or not all(
                h.entries[i][i] == lam for i in range(m)
            )


# ---------------------------------------------------------------------------
# Weyl / unipotent / epsilon representatives
# ---------------------------------------------------------------------------


def test_weyl_rep_identity_at_top():
    assert weyl_rep(QQ, 4, 4).is_identity()


def test_weyl_rep_example():
    w = weyl_rep(QQ, 2, 4)
    rows = [tuple(int(x) for x in row) for row in w.entries]
    assert rows == [(1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (0, 1, 0, 0)]


def test_weyl_rep_is_permutation():
    for size in (2, 4, 6):
        for j in range(1, size + 1):
            w = weyl_rep(QQ, j, size)
            for row in w.entries:
                assert sum(row) == 1
            for col in w.transpose().entries:
                assert sum(col) == 1


def test_weyl_rep_range_error():
    with pytest.raises(IndexOutOfRange):
        weyl_rep(QQ, 0, 4)
    with pytest.raises(IndexOutOfRange):
        weyl_rep(QQ, 5, 4)


def test_unipotent_rep():
    assert unipotent_rep(QQ, 2, [0, 0]).is_identity()
    u = unipotent_rep(QQ, 2, [1, 0])
    assert [int(x) for x in u.row(1)] == [0, 1, 1, 0]
    # group law u_j(v) u_j(w) = u_j(v + w)
    rng = random.Random(4)
    for _ in range(20):
        size = rng.randint(2, 6)
        j = rng.randint(1, size)
        v = [Fraction(rng.randint(-3, 3)) for _ in range(size - j)]
        w = [Fraction(rng.randint(-3, 3)) for _ in range(size - j)]
        lhs = unipotent_rep(QQ, j, v) * unipotent_rep(QQ, j, w)
        rhs = unipotent_rep(QQ, j, [a + b for a, b in zip(v, w)])
        assert lhs == rhs


def test_epsilon_rep_rank_zero_is_identity():
    for m, n in ((2, 2), (3, 2), (4, 3)):
        assert epsilon_rep(QQ, m, n, 0).is_identity()


def test_epsilon_rep_2_2_1():
    eps = epsilon_rep(QQ, 2, 2, 1)
    expected = ExactMatrix(
        QQ,
        [
            [1, 0, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [0, 1, 1, 0],
        ],
    )
    assert eps == expected


def test_epsilon_rep_structure():
    for m, n in ((2, 2), (3, 2), (3, 3), (4, 2)):
        for r in range(n):
            eps = epsilon_rep(QQ, m, n, r)
            assert eps.is_invertible()
            entries = {int(x) for row in eps.entries for x in row}
            assert entries <= {0, 1}
            multi = [row for row in eps.entries if sum(row) > 1]
            assert len(multi) == (1 if r > 0 else 0)


def test_epsilon_rep_range_errors():
    with pytest.raises(RankOutOfRange):
        epsilon_rep(QQ, 2, 2, 2)
    with pytest.raises(RankOutOfRange):
        epsilon_rep(QQ, 2, 3, 0)


def test_star_context_involution():
    rng = random.Random(5)
    for size in (1, 2, 3):
        ctx = StarContext(size)
        w = ctx.w_tilde(QQ)
        assert (w * w).is_identity()
        d = random_invertible(QQ, size, rng)
        assert ctx.star(ctx.star(d)) == d


# ---------------------------------------------------------------------------
# Modulus characters
# ---------------------------------------------------------------------------


def test_modulus_character_identity():
    shape = ParabolicShape(2, 1)
    assert modulus_character(shape, ExactMatrix.identity(QQ, 3)) == Fraction(1)


def test_modulus_character_diag():
    shape = ParabolicShape(1, 1)
    p = ExactMatrix.diagonal(QQ, [Fraction(3), Fraction(5)])
    assert modulus_character(shape, p) == Fraction(3, 5)


def test_modulus_character_example():
    shape = ParabolicShape(2, 1)
    p = ExactMatrix.diagonal(QQ, [2, 3, 5])
    assert modulus_character(shape, p) == Fraction(6, 25)


def test_modulus_character_not_in_parabolic():
    shape = ParabolicShape(1, 1)
    p = ExactMatrix(QQ, [[0, 1], [1, 0]])
    with pytest.raises(NotInParabolic):
        modulus_character(shape, p)


def test_abs_rational_contexts():
    assert abs_rational(Fraction(-3, 7), ValuationContext.ARCHIMEDEAN) == Fraction(3, 7)
    assert abs_rational(Fraction(12), ValuationContext.P_ADIC, p=2) == Fraction(1, 4)
    assert abs_rational(Fraction(1, 9), ValuationContext.P_ADIC, p=3) == Fraction(9)


def test_modulus_compatibility_identity():
    assert verify_modulus_compatibility(3, 2, ExactMatrix.identity(QQ, 3))


def test_modulus_compatibility_diag_example():
    p = ExactMatrix.diagonal(QQ, [3, 1])
    assert verify_modulus_compatibility(2, 1, p)


def test_modulus_compatibility_random():
    from kronzeta.cli import _random_parabolic

    rng = random.Random(6)
    for m, n in ((2, 1), (3, 2), (4, 2), (3, 3)):
        for _ in range(15):
            p = _random_parabolic(m, n, rng)
            assert verify_modulus_compatibility(m, n, p)


# ---------------------------------------------------------------------------
# Matrix plumbing
# ---------------------------------------------------------------------------


def test_inverse_and_det():
    rng = random.Random(7)
    for ring in _rings():
        for _ in range(10):
            size = rng.randint(1, 4)
            mat = random_invertible(ring, size, rng)
            assert (mat * mat.inverse()).is_identity()
            assert not ring.is_zero(mat.det())


def test_matrix_json_round_trip():
    mat = ExactMatrix(QQ, [[Fraction(-3, 7), 2], [0, Fraction(1, 2)]])
    doc = matrix_to_json(mat)
    assert doc[0][0] == "-3/7"
    assert matrix_from_json(QQ, doc) == mat
    f3 = PrimeField(3)
    mat2 = ExactMatrix(f3, [[1, 2], [0, 1]])
    assert matrix_from_json(f3, matrix_to_json(mat2)) == mat2


def test_pretty_is_deterministic():
    mat = ExactMatrix(QQ, [[1, 22], [333, 4]])
    assert mat.pretty() == mat.pretty()
    assert "333" in mat.pretty()


def test_antidiagonal_square():
    for size in (1, 2, 5):
        assert (antidiagonal(QQ, size) * antidiagonal(QQ, size)).is_identity()
