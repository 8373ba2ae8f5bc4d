"""p-adic structure theory: valuations, Cartan decomposition by elementary
divisors over the local ring at p, the volume of a Cartan cell relative to
the maximal compact (Macdonald's run-length formula), and enumeration of
dominant cocharacter tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import NonDominant, SingularMatrix
from .matgroup import ExactMatrix
from .rings import QQ, QRoot, p_valuation


@dataclass(frozen=True)
class DominantCochar:
    """Exponent tuple r_1 >= ... >= r_{n-1} >= 0 for the cell
    diag(pi^{r_1}, ..., pi^{r_{n-1}}, 1); the last slot is pinned to 0 by
    the center normalization."""

    exps: tuple

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exps)
        object.__setattr__(self, "exps", exps)
        if any(e < 0 for e in exps):
            raise NonDominant(f"negative exponent in {exps}")
        if any(exps[i] < exps[i + 1] for i in range(len(exps) - 1)):
            raise NonDominant(f"exponents not nonincreasing: {exps}")

    @property
    def n(self) -> int:
        return len(self.exps) + 1

    def total(self) -> int:
        return sum(self.exps)

    def full(self) -> tuple:
        """The length-n sequence with the pinned trailing zero."""
        return self.exps + (0,)


CocharLike = Union[DominantCochar, Sequence[int]]


def _as_cochar(t: CocharLike) -> DominantCochar:
    if isinstance(t, DominantCochar):
        return t
    return DominantCochar(tuple(t))


def enumerate_dominant(n: int, height: int) -> list:
    """All dominant tuples of length n-1 with r_1 <= height, sorted."""
    if height < 0:
        raise ValueError("height must be nonnegative")
    if n < 1:
        raise ValueError("n must be positive")
    slots = n - 1
    out = []

    def rec(prefix, bound):
        if len(prefix) == slots:
            out.append(DominantCochar(tuple(prefix)))
            return
        for v in range(bound + 1):
            rec(prefix + [v], v)

    rec([], height)
    out.sort(key=lambda c: c.exps)
    return out


# ---------------------------------------------------------------------------
# Cartan decomposition over Z localized at p
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CartanForm:
    """A * diag(p^{e_1}, ..., p^{e_n}) * B = input with e_1 >= ... >= e_n
    and A, B p-integral with p-unit determinant."""

    A: ExactMatrix
    exps: tuple
    B: ExactMatrix
    p: int

    def diagonal(self) -> ExactMatrix:
        return ExactMatrix.diagonal(QQ, [Fraction(self.p) ** e for e in self.exps])

    def reconstruct(self) -> ExactMatrix:
        return self.A * self.diagonal() * self.B


def _is_p_integral_unimodular(mat: ExactMatrix, p: int) -> bool:
    for row in mat.entries:
        for x in row:
            if x != 0 and p_valuation(x, p) < 0:
                return False
    det = mat.det()
    return det != 0 and p_valuation(det, p) == 0


def cartan_decompose(g: ExactMatrix, p: int) -> CartanForm:
    """Elementary divisors of g over Z localized at p.

    Pivot selection: entry of minimal p-valuation in the remaining block,
    ties broken row-major.  Clearing multipliers are p-integral because the
    pivot valuation is minimal, so the accumulated factors stay unimodular
    at p.  Exponents come out sorted nonincreasing.
    """
    if not g.is_square():
        raise SingularMatrix("Cartan decomposition needs a square matrix")
    n = g.rows
    work = [[Fraction(x) for x in row] for row in g.entries]
    left = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    right = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    # invariant: left_mat * work * right_mat == g

    exps = []
    for k in range(n):
        best = None
        best_val = None
        for i in range(k, n):
            for j in range(k, n):
                x = work[i][j]
                if x == 0:
                    continue
                v = p_valuation(x, p)
                if best_val is None or v < best_val:
                    best, best_val = (i, j), v
        if best is None:
            raise SingularMatrix("matrix is singular")
        bi, bj = best
        if bi != k:
            work[k], work[bi] = work[bi], work[k]
            for a in range(n):
                left[a][k], left[a][bi] = left[a][bi], left[a][k]
        if bj != k:
            for a in range(n):
                work[a][k], work[a][bj] = work[a][bj], work[a][k]
            right[k], right[bj] = right[bj], right[k]
        pivot = work[k][k]
        for i in range(k + 1, n):
            if work[i][k] == 0:
                continue
            f = work[i][k] / pivot
            work[i] = [work[i][c] - f * work[k][c] for c in range(n)]
            for a in range(n):
                left[a][k] += f * left[a][i]
        for j in range(k + 1, n):
            if work[k][j] == 0:
                continue
            f = work[k][j] / pivot
            for a in range(n):
                work[a][j] -= f * work[a][k]
            right[k] = [right[k][c] + f * right[j][c] for c in range(n)]
        exps.append(best_val)

    # absorb the unit parts of the diagonal into the left factor
    for k in range(n):
        unit = work[k][k] / Fraction(p) ** exps[k]
        for a in range(n):
            left[a][k] *= unit
        work[k][k] = Fraction(p) ** exps[k]

    # reverse to nonincreasing order, conjugating by the flip permutation
    rev = list(range(n - 1, -1, -1))
    a_mat = ExactMatrix(QQ, [[left[i][rev[j]] for j in range(n)] for i in range(n)])
    b_mat = ExactMatrix(QQ, [right[rev[i]] for i in range(n)])
    exps_sorted = tuple(exps[rev[i]] for i in range(n))

    form = CartanForm(A=a_mat, exps=exps_sorted, B=b_mat, p=p)
    if form.reconstruct() != ExactMatrix(QQ, [[Fraction(x) for x in row] for row in g.entries]):
        raise AssertionError("Cartan reconstruction failed")
    if not _is_p_integral_unimodular(a_mat, p) or not _is_p_integral_unimodular(b_mat, p):
        raise AssertionError("Cartan factors are not p-unimodular")
    return form


# ---------------------------------------------------------------------------
# Macdonald measure of a Cartan cell
# ---------------------------------------------------------------------------


def _phi(j: int, x: Fraction) -> Fraction:
    out = Fraction(1)
    for i in range(1, j + 1):
        out *= 1 - x**i
    return out


def _run_lengths(seq: Sequence[int]) -> list:
    runs = []
    count = 0
    prev = None
    for v in seq:
        if prev is None or v == prev:
            count += 1
        else:
            runs.append(count)
            count = 1
        prev = v
    runs.append(count)
    return runs


def macdonald_measure(t: CocharLike, n: int, q: int) -> QRoot:
    """Volume of the Cartan cell K t K relative to K, as an exact rational.

    With x = 1/q and run lengths n_1, ..., n_l of the full exponent sequence
    (trailing zero included), the value is

        q^(sum_i (n - 2i + 1) r_i) * phi_n(x)/(1-x)^n * prod_j (1-x)^{n_j}/phi_{n_j}(x).
    """
    cochar = _as_cochar(t)
    if cochar.n != n:
        raise NonDominant(f"tuple of length {len(cochar.exps)} is not for n = {n}")
    seq = cochar.full()
    x = Fraction(1, q)
    exponent = sum((n - 2 * (i + 1) + 1) * seq[i] for i in range(n))
    value = Fraction(q) ** exponent * _phi(n, x) / (1 - x) ** n
    for run in _run_lengths(seq):
        value *= (1 - x) ** run / _phi(run, x)
    return QRoot(value, Fraction(0), q)


def cartan_cell_count_gl2(r: int, p: int) -> int:
    """Independent count of the GL_2 cell K diag(p^r, 1) K / K.

    Enumerates column-reduced sublattice representatives [[p^a, c], [0, p^d]]
    with a + d = r, 0 <= c < p^a, keeping those with elementary divisors
    (p^r, 1), i.e. minimal entry valuation zero.  Guards the exponent in the
    closed formula against off-by-one errors.
    """
    if r < 0:
        raise NonDominant("r must be nonnegative")
    if r == 0:
        return 1
    count = 0
    for a in range(r + 1):
        d = r - a
        for c in range(p**a):
            if c == 0:
                vals = [a, d]
            else:
                cval = 0
                cc = c
                while cc % p == 0:
                    cc //= p
                    cval += 1
                vals = [a, d, cval]
            if min(vals) == 0:
                count += 1
    return count
