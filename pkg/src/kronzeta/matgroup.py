"""Dense exact matrices over pluggable rings, and the explicit group
elements used everywhere else: Kronecker products, Weyl and unipotent
representatives, the rank-r representatives eps_r, parabolic subgroups and
their modulus characters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotInParabolic,
    RankOutOfRange,
    RingMismatch,
    SingularBlock,
    SingularMatrix,
)
from .rings import QQ, p_valuation


class ExactMatrix:
    """Immutable dense matrix over an exact ring adapter.

    The ring must expose zero, one, of(), from_int(), is_zero(); entries
    must support +, -, * and (for field operations) division.
    """

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring, entries):
        rows = tuple(tuple(ring.of(x) for x in row) for row in entries)
        if not rows or not rows[0]:
            raise DimensionMismatch("empty matrix")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged rows")
        self.ring = ring
        self.rows = len(rows)
        self.cols = ncols
        self.entries = rows

    # -- constructors -------------------------------------------------------

    @staticmethod
    def identity(ring, n: int) -> "ExactMatrix":
        return ExactMatrix(
            ring,
            [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)],
        )

    @staticmethod
    def zeros(ring, rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix(ring, [[ring.zero] * cols for _ in range(rows)])

    @staticmethod
    def diagonal(ring, values) -> "ExactMatrix":
        values = [ring.of(v) for v in values]
        n = len(values)
        return ExactMatrix(
            ring,
            [
                [values[i] if i == j else ring.zero for j in range(n)]
                for i in range(n)
            ],
        )

    @staticmethod
    def permutation(ring, sigma: Sequence[int]) -> "ExactMatrix":
        """Permutation matrix with row i carrying 1 in column sigma[i] (0-based)."""
        n = len(sigma)
        if sorted(sigma) != list(range(n)):
            raise ValueError("sigma is not a permutation")
        return ExactMatrix(
            ring,
            [
                [ring.one if j == sigma[i] else ring.zero for j in range(n)]
                for i in range(n)
            ],
        )

    @staticmethod
    def from_blocks(ring, blocks) -> "ExactMatrix":
        """Assemble from a 2D grid of ExactMatrix blocks."""
        rows = []
        for block_row in blocks:
            height = block_row[0].rows
            for i in range(height):
                row = []
                for block in block_row:
                    if block.rows != height:
                        raise DimensionMismatch("inconsistent block heights")
                    row.extend(block.entries[i])
                rows.append(row)
        return ExactMatrix(ring, rows)

    # -- basic structure ----------------------------------------------------

    def row(self, i: int):
        return self.entries[i]

    def column(self, j: int):
        return tuple(self.entries[i][j] for i in range(self.rows))

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "ExactMatrix":
        return ExactMatrix(
            self.ring, [row[c0:c1] for row in self.entries[r0:r1]]
        )

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            self.ring,
            [
                [self.entries[i][j] for i in range(self.rows)]
                for j in range(self.cols)
            ],
        )

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        if not self.is_square():
            return False
        for i in range(self.rows):
            for j in range(self.cols):
                expected = self.ring.one if i == j else self.ring.zero
                if self.entries[i][j] != expected:
                    return False
        return True

    # -- arithmetic ---------------------------------------------------------

    def _check_ring(self, other: "ExactMatrix"):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring!r} vs {other.ring!r}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("addition shape mismatch")
        return ExactMatrix(
            self.ring,
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ],
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(
            self.ring, [[-x for x in row] for row in self.entries]
        )

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            self._check_ring(other)
            if self.cols != other.rows:
                raise DimensionMismatch(
                    f"({self.rows}x{self.cols}) * ({other.rows}x{other.cols})"
                )
            bt = other.transpose().entries
            zero = self.ring.zero
            out = []
            for arow in self.entries:
                out_row = []
                for bcol in bt:
                    acc = zero
                    for a, b in zip(arow, bcol):
                        acc = acc + a * b
                    out_row.append(acc)
                out.append(out_row)
            return ExactMatrix(self.ring, out)
        scalar = self.ring.of(other)
        return ExactMatrix(
            self.ring, [[x * scalar for x in row] for row in self.entries]
        )

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int) -> "ExactMatrix":
        if not self.is_square():
            raise DimensionMismatch("power of non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        result = ExactMatrix.identity(self.ring, self.rows)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def det(self):
        """Determinant by fraction-free-enough Gaussian elimination (field)."""
        if not self.is_square():
            raise DimensionMismatch("determinant of non-square matrix")
        n = self.rows
        work = [list(row) for row in self.entries]
        ring = self.ring
        det = ring.one
        for k in range(n):
            pivot_row = None
            for i in range(k, n):
                if not ring.is_zero(work[i][k]):
                    pivot_row = i
                    break
            if pivot_row is None:
                return ring.zero
            if pivot_row != k:
                work[k], work[pivot_row] = work[pivot_row], work[k]
                det = -det
            pivot = work[k][k]
            det = det * pivot
            inv = ring.one / pivot
            for i in range(k + 1, n):
                factor = work[i][k] * inv
                if ring.is_zero(factor):
                    continue
                work[i] = [
                    work[i][j] - factor * work[k][j] for j in range(n)
                ]
        return det

    def rank(self) -> int:
        work = [list(row) for row in self.entries]
        ring = self.ring
        rank = 0
        row = 0
        for col in range(self.cols):
            pivot_row = None
            for i in range(row, self.rows):
                if not ring.is_zero(work[i][col]):
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            work[row], work[pivot_row] = work[pivot_row], work[row]
            pivot = work[row][col]
            inv = ring.one / pivot
            for i in range(row + 1, self.rows):
                factor = work[i][col] * inv
                if not ring.is_zero(factor):
                    work[i] = [
                        work[i][j] - factor * work[row][j] for j in range(self.cols)
                    ]
            rank += 1
            row += 1
            if row == self.rows:
                break
        return rank

    def inverse(self) -> "ExactMatrix":
        if not self.is_square():
            raise DimensionMismatch("inverse of non-square matrix")
        n = self.rows
        ring = self.ring
        work = [list(row) for row in self.entries]
        aug = [
            [ring.one if i == j else ring.zero for j in range(n)] for i in range(n)
        ]
        for k in range(n):
            pivot_row = None
            for i in range(k, n):
                if not ring.is_zero(work[i][k]):
                    pivot_row = i
                    break
            if pivot_row is None:
                raise SingularMatrix("matrix is singular")
            if pivot_row != k:
                work[k], work[pivot_row] = work[pivot_row], work[k]
                aug[k], aug[pivot_row] = aug[pivot_row], aug[k]
            inv = ring.one / work[k][k]
            work[k] = [x * inv for x in work[k]]
            aug[k] = [x * inv for x in aug[k]]
            for i in range(n):
                if i == k:
                    continue
                factor = work[i][k]
                if ring.is_zero(factor):
                    continue
                work[i] = [work[i][j] - factor * work[k][j] for j in range(n)]
                aug[i] = [aug[i][j] - factor * aug[k][j] for j in range(n)]
        return ExactMatrix(ring, aug)

    def is_invertible(self) -> bool:
        return self.is_square() and not self.ring.is_zero(self.det())

    # -- equality / hashing -------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.ring == other.ring
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"ExactMatrix({self.ring!r}, {self.rows}x{self.cols})"

    def pretty(self) -> str:
        """Deterministic aligned text rendering."""
        cells = [[str(x) for x in row] for row in self.entries]
        width = max(len(c) for row in cells for c in row)
        return "\n".join(
            "[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells
        )


# ---------------------------------------------------------------------------
# Group element builders
# ---------------------------------------------------------------------------


def kronecker(h: ExactMatrix, g: ExactMatrix) -> ExactMatrix:
    """Kronecker product: block (i, j) of the result is h[i][j] * g.

    Embeds GL_m x GL_n into GL_{mn}; the kernel is the scalar pairs
    (c*I, c^{-1}*I).
    """
    if h.ring != g.ring:
        raise RingMismatch(f"{h.ring!r} vs {g.ring!r}")
    if not h.is_square() or not g.is_square():
        raise DimensionMismatch("Kronecker factors must be square")
    m, n = h.rows, g.rows
    out = []
    for i in range(m):
        for r in range(n):
            row = []
            for j in range(m):
                hij = h.entries[i][j]
                row.extend(hij * g.entries[r][c] for c in range(n))
            out.append(row)
    return ExactMatrix(h.ring, out)


def weyl_rep(ring, j: int, size: int) -> ExactMatrix:
    """Permutation matrix with rows e_1..e_{j-1}, e_{j+1}..e_{size}, e_j."""
    if not 1 <= j <= size:
        raise IndexOutOfRange(f"j = {j} outside [1, {size}]")
    sigma = list(range(j - 1)) + list(range(j, size)) + [j - 1]
    return ExactMatrix.permutation(ring, sigma)


def unipotent_rep(ring, j: int, tail) -> ExactMatrix:
    """Identity with row j replaced by (0_{j-1}, 1, tail)."""
    tail = [ring.of(v) for v in tail]
    size = j + len(tail)
    if not 1 <= j <= size:
        raise IndexOutOfRange(f"j = {j} outside [1, {size}]")
    rows = [
        [ring.one if i == c else ring.zero for c in range(size)]
        for i in range(size)
    ]
    rows[j - 1] = [ring.zero] * (j - 1) + [ring.one] + tail
    return ExactMatrix(ring, rows)


def rank_tail(ring, n: int, r: int):
    """The row (e_{n-1}, e_{n-2}, ..., e_{n-r}) of r blocks of length n."""
    tail = []
    for block in range(1, r + 1):
        e = [ring.zero] * n
        e[n - block - 1] = ring.one
        tail.extend(e)
    return tail


def epsilon_rep(ring, m: int, n: int, r: int) -> ExactMatrix:
    """Representative eps_r = w_{(m-r)n} * u_{(m-r)n}(e_{n-1}, ..., e_{n-r}).

    These are the n representatives of the double cosets of the mirabolic-
    type parabolic against the Kronecker-embedded GL_m x GL_n; eps_0 is the
    identity.
    """
    if n > m:
        raise RankOutOfRange(f"need n <= m, got n = {n} > m = {m}")
    if not 0 <= r <= n - 1:
        raise RankOutOfRange(f"r = {r} outside [0, {n - 1}]")
    size = m * n
    j = (m - r) * n
    return weyl_rep(ring, j, size) * unipotent_rep(ring, j, rank_tail(ring, n, r))


def antidiagonal(ring, size: int) -> ExactMatrix:
    """Anti-diagonal permutation matrix (an involution)."""
    return ExactMatrix.permutation(ring, list(reversed(range(size))))


def star_plain(y: ExactMatrix) -> ExactMatrix:
    """y* = (y^T)^{-1}."""
    return y.transpose().inverse()


@dataclass(frozen=True)
class StarContext:
    """Holds the anti-diagonal involution w of a fixed size and the twisted
    star d -> w^{-1} (d^T)^{-1} w used by the stabilizer block condition."""

    size: int

    def w_tilde(self, ring) -> ExactMatrix:
        return antidiagonal(ring, self.size)

    def star(self, d: ExactMatrix) -> ExactMatrix:
        if d.rows != self.size or d.cols != self.size:
            raise DimensionMismatch(f"expected {self.size}x{self.size} block")
        w = self.w_tilde(d.ring)
        return w * star_plain(d) * w


def star_twisted(d: ExactMatrix) -> ExactMatrix:
    """Twisted star of matching size: antidiag^{-1} (d^T)^{-1} antidiag."""
    return StarContext(d.rows).star(d)


# ---------------------------------------------------------------------------
# Parabolic subgroups and modulus characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParabolicShape:
    """Block upper-triangular shape with Levi GL_l x GL_r."""

    l: int
    r: int

    def __post_init__(self):
        if self.l < 0 or self.r < 0 or self.l + self.r <= 0:
            raise ValueError("block sizes must be nonnegative with positive sum")

    @property
    def size(self) -> int:
        return self.l + self.r

    def contains(self, p: ExactMatrix) -> bool:
        if p.rows != self.size or p.cols != self.size:
            return False
        ring = p.ring
        for i in range(self.l, self.size):
            for j in range(self.l):
                if not ring.is_zero(p.entries[i][j]):
                    return False
        return True

    def levi_blocks(self, p: ExactMatrix):
        if not self.contains(p):
            raise NotInParabolic(f"matrix not in P_({self.l},{self.r})")
        top = p.submatrix(0, self.l, 0, self.l) if self.l else None
        bottom = p.submatrix(self.l, self.size, self.l, self.size) if self.r else None
        return top, bottom


class ValuationContext(enum.Enum):
    """How the caller turns signed exact values into absolute values."""

    ARCHIMEDEAN = "archimedean"
    P_ADIC = "p-adic"


def abs_rational(x: Fraction, context: ValuationContext, p: Optional[int] = None):
    if context is ValuationContext.ARCHIMEDEAN:
        return abs(Fraction(x))
    if p is None:
        raise ValueError("p-adic absolute value needs the prime p")
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    return Fraction(1, p) ** p_valuation(x, p)


def modulus_character(shape: ParabolicShape, p: ExactMatrix):
    """Signed value (det A)^r * (det B)^{-l} of the Levi blocks of p.

    Absolute values are the caller's business; apply abs_rational with the
    appropriate ValuationContext to get the actual modulus character.
    """
    top, bottom = shape.levi_blocks(p)
    ring = p.ring
    det_top = top.det() if top is not None else ring.one
    det_bottom = bottom.det() if bottom is not None else ring.one
    if ring.is_zero(det_top) or ring.is_zero(det_bottom):
        raise SingularBlock("Levi block is singular")
    value = ring.one
    for _ in range(shape.r):
        value = value * det_top
    for _ in range(shape.l):
        value = value / det_bottom
    return value


def last_row_parabolic_corner(x: ExactMatrix):
    """If x lies in P_{size-1,1}, return the corner entry; else None."""
    ring = x.ring
    last = x.entries[-1]
    if any(not ring.is_zero(v) for v in last[:-1]):
        return None
    if ring.is_zero(last[-1]):
        return None
    return last[-1]


def verify_modulus_compatibility(m: int, n: int, p: ExactMatrix) -> bool:
    """Conjugation compatibility of the two modulus characters over Q.

    For block upper-triangular p with Levi blocks A (size m-n) and D
    (size n), the element eps~ * t(p, D*) * eps~^{-1} (D* the twisted star)
    must land in the mirabolic-type parabolic of GL_{mn} with corner entry
    exactly 1, and the modulus character there must equal the modulus
    character of p, both computed with the ordinary absolute value.
    """
    if n > m:
        raise RankOutOfRange(f"need n <= m, got n = {n} > m = {m}")
    ring = p.ring
    shape = ParabolicShape(m - n, n)
    if not shape.contains(p):
        raise NotInParabolic("p is not block upper-triangular of shape (m-n, n)")
    top, bottom = shape.levi_blocks(p)
    if (top is not None and ring.is_zero(top.det())) or ring.is_zero(bottom.det()):
        raise SingularBlock("Levi block of p is singular")

    d_star = star_twisted(bottom)
    eps = epsilon_rep(ring, m, n, n - 1)
    x = eps * kronecker(p, d_star) * eps.inverse()

    corner = last_row_parabolic_corner(x)
    if corner is None or corner != ring.one:
        return False

    size = m * n
    big_shape = ParabolicShape(size - 1, 1)
    lhs = abs_rational(
        modulus_character(big_shape, x), ValuationContext.ARCHIMEDEAN
    )
    rhs = abs_rational(
        modulus_character(shape, p), ValuationContext.ARCHIMEDEAN
    )
    return lhs == rhs


# ---------------------------------------------------------------------------
# Random sampling and serialization helpers
# ---------------------------------------------------------------------------


def random_invertible(ring, n: int, rng, entry_sampler=None) -> ExactMatrix:
    """Rejection-sample an invertible n x n matrix over the ring."""
    if entry_sampler is None:
        if ring is QQ or isinstance(ring, type(QQ)):
            entry_sampler = lambda: Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        elif hasattr(ring, "q"):
            entry_sampler = lambda: rng.randrange(ring.q)
        else:
            raise ValueError("no default sampler for this ring")
    while True:
        mat = ExactMatrix(
            ring, [[entry_sampler() for _ in range(n)] for _ in range(n)]
        )
        if mat.is_invertible():
            return mat


def matrix_to_json(mat: ExactMatrix) -> list:
    """Rows of exact strings ("-3/7" over Q, residues over F_q)."""
    return [[str(x) for x in row] for row in mat.entries]


def matrix_from_json(ring, rows: list) -> ExactMatrix:
    parsed = []
    for row in rows:
        out = []
        for cell in row:
            if isinstance(cell, str) and "/" in cell:
                out.append(ring.of(Fraction(cell)))
            else:
                out.append(ring.of(int(cell)))
        parsed.append(out)
    return ExactMatrix(ring, parsed)
