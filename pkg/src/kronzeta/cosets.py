"""Finite-field coset geometry for the mirabolic-type parabolic of GL_{mn}
against the Kronecker-embedded GL_m x GL_n.

A right coset of the parabolic is determined by the last row of the matrix
up to scalar, so cosets are points of projective (mn-1)-space.  Cutting the
label into m blocks of length n gives an m x n matrix whose rank classifies
the double coset; the classifier also produces a constructive witness
(p, h, g) with input = p * eps_r * t(h, g).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Optional

from .errors import BadShape, BudgetExceeded, SingularMatrix
from .matgroup import (
    ExactMatrix,
    antidiagonal,
    epsilon_rep,
    kronecker,
    last_row_parabolic_corner,
    rank_tail,
    star_twisted,
    unipotent_rep,
    weyl_rep,
)
from .rings import PrimeField


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------


def coset_label(g: ExactMatrix) -> tuple:
    """Normalized last row of g: the projective label of the coset P*g.

    Left multiplication by the parabolic only rescales the last row, so the
    label depends on the coset alone.
    """
    if not g.is_invertible():
        raise SingularMatrix("coset label needs an invertible matrix")
    return normalize_label(g.row(g.rows - 1), g.ring)


def normalize_label(row, ring) -> tuple:
    for x in row:
        if not ring.is_zero(x):
            inv = ring.one / x
            return tuple(v * inv for v in row)
    raise SingularMatrix("zero row cannot be a coset label")


def reshape_label(label, m: int, n: int, ring) -> ExactMatrix:
    """Cut a length-mn row into m consecutive blocks of length n."""
    if len(label) != m * n:
        raise BadShape(f"label length {len(label)} != {m}*{n}")
    return ExactMatrix(ring, [label[i * n : (i + 1) * n] for i in range(m)])


def label_rank(label, m: int, n: int, ring) -> int:
    return reshape_label(label, m, n, ring).rank()


# ---------------------------------------------------------------------------
# Double-coset classifier with constructive witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DoubleCosetClass:
    """Rank label r plus an optional witness (p, h, g) reconstructing the
    input as p * eps_r * t(h, g)."""

    r: int
    witness: Optional[tuple] = None


def _rotation_to_front(size: int, k: int) -> list:
    # cycle 1 -> 2 -> ... -> k -> 1 on the first k indices (1-based), else fixed
    sigma = list(range(size))
    for i in range(k - 1):
        sigma[i] = i + 1
    sigma[k - 1] = 0
    return sigma


def _rank_spread(size: int, r: int) -> list:
    # i -> i + (size - r - 1) for the first r+1 indices, the rest slide down;
    # this is what moves the top-left identity block onto the eps_r tail
    sigma = list(range(size))
    for i in range(r + 1):
        sigma[i] = i + size - r - 1
    for i in range(r + 1, size):
        sigma[i] = i - (r + 1)
    return sigma


def _in_mirabolic(x: ExactMatrix) -> bool:
    return last_row_parabolic_corner(x) is not None


def classify_double_coset(
    g: ExactMatrix, m: int, n: int, with_witness: bool = True
) -> DoubleCosetClass:
    """Classify the double coset of g and optionally produce a witness.

    The witness chain mirrors the reduction proofs: move the leading label
    entry to position 1 with a tensor rotation, bring the reshaped label to
    rank normal form with row/column operations that preserve the leading 1,
    then spread the identity block onto the eps_r pattern.  Every step is
    verified exactly; the final identity g = p * eps_r * t(h, g') is
    asserted before returning.
    """
    if n > m:
        raise BadShape(f"classifier needs n <= m, got n = {n} > m = {m}")
    ring = g.ring
    size = m * n
    if g.rows != size or g.cols != size:
        raise BadShape(f"matrix size {g.rows} != mn = {size}")

    label = coset_label(g)
    r = label_rank(label, m, n, ring) - 1
    if not with_witness:
        return DoubleCosetClass(r)

    # stage 1: g = p0 * w_j * u_j(tail), j = leading index of the label
    j = next(i for i, x in enumerate(label) if not ring.is_zero(x)) + 1
    tail = list(label[j:])
    bj = weyl_rep(ring, j, size) * unipotent_rep(ring, j, tail)
    p0 = g * bj.inverse()
    assert _in_mirabolic(p0)

    # stage 2: rotate index j to 1 (kron of two front rotations)
    alpha, beta = divmod(j - 1, n)
    e1_h = ExactMatrix.permutation(ring, _rotation_to_front(m, alpha + 1))
    e1_g = ExactMatrix.permutation(ring, _rotation_to_front(n, beta + 1))
    e1 = kronecker(e1_h, e1_g)
    u1 = e1.inverse() * unipotent_rep(ring, j, tail) * e1
    first = u1.row(0)
    assert first[0] == ring.one
    v1 = list(first[1:])
    p1 = weyl_rep(ring, j, size) * e1 * weyl_rep(ring, 1, size).inverse()
    assert _in_mirabolic(p1)

    # stage 3: reduce the reshaped row to [[I_{r+1}, 0], [0, 0]] with
    # operations fixing the leading 1 (lowest-index pivots)
    full = [ring.one] + v1
    rmat = [list(full[i * n : (i + 1) * n]) for i in range(m)]
    h_acc = [[ring.one if a == b else ring.zero for b in range(m)] for a in range(m)]
    g_acc = [[ring.one if a == b else ring.zero for b in range(n)] for a in range(n)]

    def row_sub(i, k, f):  # row_i -= f * row_k, in rmat and h_acc
        rmat[i] = [rmat[i][c] - f * rmat[k][c] for c in range(n)]
        h_acc[i] = [h_acc[i][c] - f * h_acc[k][c] for c in range(m)]

    def col_sub(jc, k, f):  # col_jc -= f * col_k, in rmat and g_acc
        for a in range(m):
            rmat[a][jc] = rmat[a][jc] - f * rmat[a][k]
        for a in range(n):
            g_acc[a][jc] = g_acc[a][jc] - f * g_acc[a][k]

    for i in range(1, m):
        if not ring.is_zero(rmat[i][0]):
            row_sub(i, 0, rmat[i][0])
    for jc in range(1, n):
        if not ring.is_zero(rmat[0][jc]):
            col_sub(jc, 0, rmat[0][jc])

    k = 1
    while k < m and k < n:
        pivot = None
        for i in range(k, m):
            for jc in range(k, n):
                if not ring.is_zero(rmat[i][jc]):
                    pivot = (i, jc)
                    break
            if pivot:
                break
        if pivot is None:
            break
        pi, pj = pivot
        if pi != k:
            rmat[k], rmat[pi] = rmat[pi], rmat[k]
            h_acc[k], h_acc[pi] = h_acc[pi], h_acc[k]
        if pj != k:
            for a in range(m):
                rmat[a][k], rmat[a][pj] = rmat[a][pj], rmat[a][k]
            for a in range(n):
                g_acc[a][k], g_acc[a][pj] = g_acc[a][pj], g_acc[a][k]
        inv = ring.one / rmat[k][k]
        rmat[k] = [x * inv for x in rmat[k]]
        h_acc[k] = [x * inv for x in h_acc[k]]
        for i in range(1, m):
            if i != k and not ring.is_zero(rmat[i][k]):
                row_sub(i, k, rmat[i][k])
        for jc in range(1, n):
            if jc != k and not ring.is_zero(rmat[k][jc]):
                col_sub(jc, k, rmat[k][jc])
        k += 1

    rank = sum(
        1
        for i in range(m)
        if any(not ring.is_zero(x) for x in rmat[i])
    )
    assert rank == r + 1

    h0 = ExactMatrix(ring, h_acc).transpose()
    g0 = ExactMatrix(ring, g_acc)
    reduced = ExactMatrix(ring, rmat)
    expected = ExactMatrix(
        ring,
        [
            [ring.one if (i == jc and i <= r) else ring.zero for jc in range(n)]
            for i in range(m)
        ],
    )
    assert reduced == expected

    w1 = weyl_rep(ring, 1, size)
    u_v1 = unipotent_rep(ring, 1, v1)
    b_prime = []
    for i in range(m):
        b_prime.extend(rmat[i])
    u_bp = unipotent_rep(ring, 1, b_prime[1:])
    t_h0g0 = kronecker(h0, g0)
    p2 = w1 * u_v1 * t_h0g0 * (w1 * u_bp).inverse()
    assert _in_mirabolic(p2)

    # stage 4: spread the identity block onto the eps_r tail
    e2_h = ExactMatrix.permutation(ring, _rank_spread(m, r))
    e2_g = antidiagonal(ring, n)
    e2 = kronecker(e2_h, e2_g)
    target_j = (m - r) * n
    u_target = unipotent_rep(ring, target_j, rank_tail(ring, n, r))
    assert e2.inverse() * u_bp * e2 == u_target
    p3 = w1 * e2 * weyl_rep(ring, target_j, size).inverse()
    assert _in_mirabolic(p3)

    p = p0 * p1 * p2 * p3
    h_wit = e2_h.inverse() * h0.inverse() * e1_h.inverse()
    g_wit = e2_g.inverse() * g0.inverse() * e1_g.inverse()
    eps = epsilon_rep(ring, m, n, r)
    assert _in_mirabolic(p)
    if p * eps * kronecker(h_wit, g_wit) != g:
        raise AssertionError("witness failed to reconstruct the input")
    return DoubleCosetClass(r, (p, h_wit, g_wit))


# ---------------------------------------------------------------------------
# Orbit enumeration over F_q (integer fast path)
# ---------------------------------------------------------------------------


def _gl_order(size: int, q: int) -> int:
    order = 1
    for i in range(size):
        order *= q**size - q**i
    return order


def _primitive_root(q: int) -> int:
    for g in range(2, q):
        seen = set()
        x = 1
        for _ in range(q - 1):
            x = x * g % q
            seen.add(x)
        if len(seen) == q - 1:
            return g
    return 1


def _gl_generators(size: int, q: int) -> list:
    """Small generating set of GL_size(F_q) as integer grids."""
    gens = []
    if size >= 2:
        transvection = [[1 if a == b else 0 for b in range(size)] for a in range(size)]
        transvection[0][1] = 1
        gens.append(transvection)
        cycle = [[0] * size for _ in range(size)]
        for a in range(size):
            cycle[a][(a + 1) % size] = 1
        gens.append(cycle)
    if q > 2:
        diag = [[1 if a == b else 0 for b in range(size)] for a in range(size)]
        diag[0][0] = _primitive_root(q)
        gens.append(diag)
    return gens


def _int_kron(h, g) -> list:
    m, n = len(h), len(g)
    out = [[0] * (m * n) for _ in range(m * n)]
    for i in range(m):
        for j in range(m):
            hij = h[i][j]
            if hij == 0:
                continue
            for a in range(n):
                for b in range(n):
                    out[i * n + a][j * n + b] = hij * g[a][b]
    return out


def _identity_grid(size: int) -> list:
    return [[1 if a == b else 0 for b in range(size)] for a in range(size)]


def _normalize_int(vec, q: int) -> tuple:
    for x in vec:
        if x % q:
            inv = pow(x, q - 2, q)
            return tuple(v * inv % q for v in vec)
    raise ValueError("zero vector")


def _act(vec, mat, q: int) -> tuple:
    size = len(vec)
    out = [0] * size
    for i, v in enumerate(vec):
        if v:
            row = mat[i]
            for jc in range(size):
                out[jc] += v * row[jc]
    return tuple(x % q for x in out)


def _projective_points(size: int, q: int):
    for lead in range(size):
        free = size - lead - 1
        for rest in product(range(q), repeat=free):
            yield (0,) * lead + (1,) + rest


def _int_rank(grid, q: int) -> int:
    work = [list(r) for r in grid]
    rows, cols = len(work), len(work[0])
    rank = 0
    row = 0
    for col in range(cols):
        piv = None
        for i in range(row, rows):
            if work[i][col] % q:
                piv = i
                break
        if piv is None:
            continue
        work[row], work[piv] = work[piv], work[row]
        inv = pow(work[row][col], q - 2, q)
        work[row] = [x * inv % q for x in work[row]]
        for i in range(row + 1, rows):
            f = work[i][col] % q
            if f:
                work[i] = [(work[i][c] - f * work[row][c]) % q for c in range(cols)]
        rank += 1
        row += 1
        if row == rows:
            break
    return rank


@dataclass(frozen=True)
class OrbitRow:
    orbit_id: int
    size: int
    rank: int
    epsilon_ranks: tuple  # r values whose eps_r label lies in this orbit


@dataclass(frozen=True)
class OrbitTable:
    m: int
    n: int
    q: int
    points: int
    orbits: tuple

    @property
    def sizes(self) -> tuple:
        return tuple(row.size for row in self.orbits)


def enumerate_orbits(m: int, n: int, q: int, budget: int = 10**7) -> OrbitTable:
    """Partition projective labels into orbits of the Kronecker action.

    Breadth-first closure under a generating set is the ground truth; the
    reshaped-row rank is recorded per orbit (and doubles as a certificate,
    since the action cannot change it).
    """
    size = m * n
    points_count = (q**size - 1) // (q - 1)
    if points_count > budget:
        raise BudgetExceeded(f"{points_count} projective points exceed {budget}")

    id_m = _identity_grid(m)
    id_n = _identity_grid(n)
    action = [_int_kron(h, id_n) for h in _gl_generators(m, q)]
    action += [_int_kron(id_m, g) for g in _gl_generators(n, q)]

    orbit_of = {}
    orbit_members = []
    for start in _projective_points(size, q):
        if start in orbit_of:
            continue
        oid = len(orbit_members)
        frontier = [start]
        orbit_of[start] = oid
        members = [start]
        while frontier:
            nxt = []
            for vec in frontier:
                for mat in action:
                    img = _normalize_int(_act(vec, mat, q), q)
                    if img not in orbit_of:
                        orbit_of[img] = oid
                        members.append(img)
                        nxt.append(img)
            frontier = nxt
        orbit_members.append(members)

    def rank_of(vec) -> int:
        grid = [list(vec[i * n : (i + 1) * n]) for i in range(m)]
        return _int_rank(grid, q)

    ranks = []
    for members in orbit_members:
        rk = rank_of(members[0])
        ranks.append(rk)

    epsilon_orbit = {}
    if n <= m:
        field = PrimeField(q)
        for r in range(n):
            eps = epsilon_rep(field, m, n, r)
            vec = tuple(x.residue for x in eps.row(size - 1))
            epsilon_orbit.setdefault(orbit_of[_normalize_int(vec, q)], []).append(r)

    order = sorted(range(len(orbit_members)), key=lambda i: ranks[i])
    rows = []
    for new_id, old_id in enumerate(order):
        rows.append(
            OrbitRow(
                orbit_id=new_id,
                size=len(orbit_members[old_id]),
                rank=ranks[old_id],
                epsilon_ranks=tuple(sorted(epsilon_orbit.get(old_id, ()))),
            )
        )
    assert sum(row.size for row in rows) == points_count
    return OrbitTable(m=m, n=n, q=q, points=points_count, orbits=tuple(rows))


# ---------------------------------------------------------------------------
# Stabilizers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _all_invertible(size: int, q: int) -> tuple:
    field = PrimeField(q)
    out = []
    for entries in product(range(q), repeat=size * size):
        grid = [entries[i * size : (i + 1) * size] for i in range(size)]
        if _int_rank(grid, q) == size:
            out.append(ExactMatrix(field, grid))
    return tuple(out)


@dataclass(frozen=True)
class StabilizerDescription:
    """Predicted stabilizer of the eps_r coset: pairs t(h, g) with
    h = [[A, B], [0, c * d~]], g = [[a, b], [0, d]] for d in GL_{r+1}
    and the twisted star d~."""

    m: int
    n: int
    r: int

    def contains(self, h: ExactMatrix, g: ExactMatrix) -> bool:
        ring = h.ring
        m, n, r = self.m, self.n, self.r
        if h.rows != m or g.rows != n:
            return False
        if not h.is_invertible() or not g.is_invertible():
            return False
        for i in range(m - r - 1, m):
            for jc in range(m - r - 1):
                if not ring.is_zero(h.entries[i][jc]):
                    return False
        for i in range(n - r - 1, n):
            for jc in range(n - r - 1):
                if not ring.is_zero(g.entries[i][jc]):
                    return False
        d = g.submatrix(n - r - 1, n, n - r - 1, n)
        hd = h.submatrix(m - r - 1, m, m - r - 1, m)
        twisted = star_twisted(d)
        scale = None
        for i in range(r + 1):
            for jc in range(r + 1):
                if not ring.is_zero(twisted.entries[i][jc]):
                    scale = hd.entries[i][jc] / twisted.entries[i][jc]
                    break
            if scale is not None:
                break
        if scale is None or ring.is_zero(scale):
            return False
        return hd == twisted * scale


def _block_upper(ring, size: int, head: int, top_left, top_right, bottom):
    rows = [[ring.zero] * size for _ in range(size)]
    for i in range(head):
        for jc in range(head):
            rows[i][jc] = top_left[i][jc]
        for jc in range(size - head):
            rows[i][head + jc] = top_right[i][jc]
    for i in range(size - head):
        for jc in range(size - head):
            rows[head + i][head + jc] = bottom.entries[i][jc]
    return ExactMatrix(ring, rows)


def stabilizer_bruteforce(
    m: int, n: int, r: int, q: int, budget: int = 10**7
) -> frozenset:
    """All t(h, g) whose eps_r-conjugate lands in the parabolic.

    Enumerated by literally conjugating every pair; the kernel of t folds
    scalar pairs automatically because the set stores images.
    """
    pairs = _gl_order(m, q) * _gl_order(n, q)
    if pairs > budget:
        raise BudgetExceeded(f"{pairs} pairs exceed budget {budget}")
    field = PrimeField(q)
    eps = epsilon_rep(field, m, n, r)
    eps_inv = eps.inverse()
    id_m = ExactMatrix.identity(field, m)
    id_n = ExactMatrix.identity(field, n)
    right_factors = [kronecker(id_m, g) for g in _all_invertible(n, q)]
    found = set()
    for h in _all_invertible(m, q):
        left = kronecker(h, id_n)
        for right in right_factors:
            tensor = left * right
            if _in_mirabolic(eps * tensor * eps_inv):
                found.add(tensor)
    return frozenset(found)


def stabilizer_predicted(m: int, n: int, r: int, q: int) -> frozenset:
    """The parametrized stabilizer set, enumerated from its block form."""
    field = PrimeField(q)
    k = r + 1
    out = set()
    d_choices = _all_invertible(k, q)
    a_choices = _all_invertible(m - k, q) if m > k else (None,)
    alpha_choices = _all_invertible(n - k, q) if n > k else (None,)
    b_shapes = list(product(range(q), repeat=(m - k) * k)) if m > k else [()]
    beta_shapes = list(product(range(q), repeat=(n - k) * k)) if n > k else [()]
    units = [u for u in range(1, q)]
    for d in d_choices:
        twisted = star_twisted(d)
        for lam in units:
            scaled = twisted * lam
            for a_blk in a_choices:
                for b_flat in b_shapes:
                    if m > k:
                        top_right = [
                            [field.of(b_flat[i * k + jc]) for jc in range(k)]
                            for i in range(m - k)
                        ]
                        h = _block_upper(
                            field, m, m - k, a_blk.entries, top_right, scaled
                        )
                    else:
                        h = scaled
                    for alpha_blk in alpha_choices:
                        for beta_flat in beta_shapes:
                            if n > k:
                                top_right_g = [
                                    [field.of(beta_flat[i * k + jc]) for jc in range(k)]
                                    for i in range(n - k)
                                ]
                                g = _block_upper(
                                    field,
                                    n,
                                    n - k,
                                    alpha_blk.entries,
                                    top_right_g,
                                    d,
                                )
                            else:
                                g = d
                            out.add(kronecker(h, g))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Lemma-level randomized and exhaustive verifiers
# ---------------------------------------------------------------------------


def _random_h_element(size: int, q: int, rng) -> ExactMatrix:
    """Random element of the subgroup fixing e_1 up to upper content:
    [[1, x], [0, h']] with h' invertible."""
    field = PrimeField(q)
    if size == 1:
        return ExactMatrix.identity(field, 1)
    while True:
        grid = [
            [rng.randrange(q) for _ in range(size - 1)] for _ in range(size - 1)
        ]
        if _int_rank(grid, q) == size - 1:
            break
    rows = [[1] + [rng.randrange(q) for _ in range(size - 1)]]
    for i in range(size - 1):
        rows.append([0] + grid[i])
    return ExactMatrix(field, rows)


def verify_orbit_lemma(m: int, n: int, q: int, trials: int, rng) -> bool:
    """Sampled check that right translation by t(h, g) acts on the reshaped
    label by R -> h^T R g, at the level of coset labels."""
    field = PrimeField(q)
    size = m * n
    w1 = weyl_rep(field, 1, size)
    for _ in range(trials):
        h = _random_h_element(m, q, rng)
        g = _random_h_element(n, q, rng)
        rgrid = [[rng.randrange(q) for _ in range(n)] for _ in range(m)]
        rgrid[0][0] = 1
        rmat = ExactMatrix(field, rgrid)
        flat = [x for row in rmat.entries for x in row]
        u_r = unipotent_rep(field, 1, flat[1:])
        lhs = coset_label(w1 * u_r * kronecker(h, g))
        moved = h.transpose() * rmat * g
        flat2 = [x for row in moved.entries for x in row]
        scale = flat2[0].inverse()
        flat2 = [x * scale for x in flat2]
        u_r2 = unipotent_rep(field, 1, flat2[1:])
        rhs = coset_label(w1 * u_r2)
        if lhs != rhs:
            return False
    return True


def verify_tensor_inv_lemma(l: int, q: int, budget: int = 10**7) -> bool:
    """Exhaustive equivalence: (S x R) fixes sum_j e_j x e_j up to alpha
    exactly when S R^T = alpha I, for all l x l pairs over F_q and all alpha.

    The left side goes through an explicit Kronecker matrix acting on the
    vectorized identity; the right side is a plain matrix product, so the
    sweep cross-checks the embedding itself.
    """
    pairs = q ** (2 * l * l)
    if pairs > budget:
        raise BudgetExceeded(f"{pairs} pairs exceed budget {budget}")
    dim = l * l
    w = [1 if (i // l) == (i % l) else 0 for i in range(dim)]
    mats = [
        [list(entries[i * l : (i + 1) * l]) for i in range(l)]
        for entries in product(range(q), repeat=l * l)
    ]
    for s in mats:
        for t in mats:
            big = _int_kron(s, t)
            image = [
                sum(big[i][jc] * w[jc] for jc in range(dim)) % q for i in range(dim)
            ]
            prod_st = [
                [
                    sum(s[i][k] * t[jc][k] for k in range(l)) % q
                    for jc in range(l)
                ]
                for i in range(l)
            ]
            for alpha in range(q):
                lhs = all(
                    image[i] == alpha * w[i] % q for i in range(dim)
                )
                rhs = all(
                    prod_st[i][jc] == (alpha if i == jc else 0) % q
                    for i in range(l)
                    for jc in range(l)
                )
                if lhs != rhs:
                    return False
    return True
