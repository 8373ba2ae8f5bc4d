"""Numerical verification of the real-place section value: the phi sequence,
the explicit closed-form Gram-Schmidt recursion for the matrix with last row
(t_{n-1}, ..., t_1, 1), a numeric Iwasawa factorization as ground truth, and
the exponent law for the modulus character of the triangular factor.

The closed-form recursion is the artifact under test; iterative modified
Gram-Schmidt and the RQ-based Iwasawa factorization are the oracles.
Double precision throughout; tolerances are pinned by the callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import AssertionFailed, DomainError, SingularMatrix
from .matgroup import epsilon_rep
from .rings import QQ

PHI_TOL = 1e-14
RECONSTRUCT_TOL = 1e-12
CLOSED_FORM_TOL = 1e-10


def _validate_point(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1:
        raise DomainError("torus point must be a 1-d array")
    if t.size == 0:
        return t  # the trivial torus of a rank-one group
    if t[0] <= 0.0:
        raise DomainError("entries must be positive")
    if np.any(np.diff(t) < 0.0) or t[-1] > 1.0:
        raise DomainError("need 0 < t_1 <= ... <= t_{n-1} <= 1")
    return t


@dataclass(frozen=True)
class PhiSequence:
    """phi_i = 1 + sum_{j >= i} t_j^2 for i = 1..n; phi_n = 1 and the
    recursion phi_i + t_{i-1}^2 = phi_{i-1} holds."""

    values: tuple

    def __getitem__(self, i: int) -> float:
        # 1-based, matching the recursion indexing
        return self.values[i - 1]

    @property
    def n(self) -> int:
        return len(self.values)


def phi_sequence(t) -> PhiSequence:
    t = _validate_point(t)
    n = t.size + 1
    squares = t * t
    values = [1.0 + squares[i:].sum() for i in range(n - 1)] + [1.0]
    phis = PhiSequence(tuple(values))
    for i in range(2, n + 1):
        if abs(phis[i] + t[i - 2] ** 2 - phis[i - 1]) > PHI_TOL * phis[i - 1]:
            raise AssertionFailed("phi recursion out of tolerance")
    return phis


def torus_matrix(t) -> np.ndarray:
    """The n x n matrix with rows e_1, ..., e_{n-1} and last row
    (t_{n-1}, ..., t_1, 1)."""
    t = _validate_point(t)
    n = t.size + 1
    mat = np.eye(n)
    mat[n - 1, : n - 1] = t[::-1]
    return mat


def closed_form_vectors(t) -> tuple:
    """Unnormalized orthogonal vectors from the closed-form recursion.

    v_1 is the last row; for i >= 2,
      v_i = (1 - t_{i-1}^2/phi_{i-1}) e_{n-i+1}
            - (t_{i-1}/phi_{i-1}) sum_{r=i}^{n-1} t_r e_{n-r}
            - (t_{i-1}/phi_{i-1}) e_n,
    with squared norms phi_1 and phi_i/phi_{i-1}.
    """
    t = _validate_point(t)
    n = t.size + 1
    phis = phi_sequence(t)
    vecs = np.zeros((n, n))
    vecs[0] = torus_matrix(t)[n - 1]
    for i in range(2, n + 1):
        ratio = t[i - 2] / phis[i - 1]
        v = np.zeros(n)
        v[n - i] = 1.0 - t[i - 2] * ratio
        for r in range(i, n):
            v[n - r - 1] = -ratio * t[r - 1]
        v[n - 1] = -ratio
        vecs[i - 1] = v
    norms_sq = np.array(
        [phis[1]] + [phis[i] / phis[i - 1] for i in range(2, n + 1)]
    )
    return vecs, norms_sq


def mgs_vectors(rows: np.ndarray) -> np.ndarray:
    """Iterative modified Gram-Schmidt on the given rows, in order;
    returns the unnormalized orthogonal system (the oracle side)."""
    rows = np.asarray(rows, dtype=float)
    out = np.zeros_like(rows)
    for i, row in enumerate(rows):
        v = row.copy()
        for j in range(i):
            prev = out[j]
            v = v - (v @ prev) / (prev @ prev) * prev
        out[i] = v
    return out


def gram_schmidt_explicit(t):
    """Factor the torus matrix as y_P (upper triangular, positive diagonal)
    times y_K (orthogonal), entirely from the closed-form recursion.

    Returns (y_P, y_K, norms_sq) where norms_sq[i-1] is the squared norm of
    the i-th closed-form vector (phi_1, then phi_i/phi_{i-1}).
    """
    t = _validate_point(t)
    n = t.size + 1
    phis = phi_sequence(t)
    vecs, norms_sq = closed_form_vectors(t)
    norms = np.sqrt(norms_sq)

    # y_K stacks the normalized vectors in reverse order (row k is v_{n+1-k})
    y_k = vecs[::-1] / norms[::-1, None]

    # coefficients of v_i over the original rows: zero above the step,
    # 1 at r = i-1, t_{i-1} t_r / phi_{i-1} for 1 <= r <= i-2, and
    # -t_{i-1}/phi_{i-1} at r = 0
    coeff = np.zeros((n, n))
    coeff[0, 0] = 1.0
    for i in range(2, n + 1):
        ratio = t[i - 2] / phis[i - 1]
        coeff[i - 1, i - 1] = 1.0
        for r in range(1, i - 1):
            coeff[i - 1, r] = ratio * t[r - 1]
        coeff[i - 1, 0] = -ratio

    # y_P^{-1}[k, c] expresses row k of y_K over the matrix rows: with
    # u_{n-r} in column n-1-r, entry (k, c) is coeff[n-1-k, n-1-c] scaled
    y_p_inv = np.zeros((n, n))
    for k in range(n):
        i = n - k  # 1-based index of the vector in row k
        for r in range(n):
            y_p_inv[k, n - 1 - r] = coeff[i - 1, r] / norms[i - 1]
    y_p = np.linalg.inv(y_p_inv)
    return y_p, y_k, norms_sq


@dataclass(frozen=True)
class IwasawaFactors:
    x_p: np.ndarray
    x_k: np.ndarray


def iwasawa_numeric(g) -> IwasawaFactors:
    """Ground-truth factorization g = x_P x_K with x_P upper triangular
    (positive diagonal) and x_K orthogonal, via an RQ decomposition."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise SingularMatrix("need a square matrix")
    sign, logdet = np.linalg.slogdet(g)
    if sign == 0 or not np.isfinite(logdet):
        raise SingularMatrix("matrix is numerically singular")
    r, q = scipy.linalg.rq(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    x_p = r * signs[None, :]
    x_k = q * signs[:, None]
    return IwasawaFactors(x_p=x_p, x_k=x_k)


def embedded_cell_matrix(m: int, n: int, t) -> np.ndarray:
    """eps~ times the Kronecker embedding of diag(t_1, ..., t_{n-1}, 1)."""
    t = _validate_point(t)
    if t.size + 1 != n:
        raise DomainError(f"point of length {t.size} is not for n = {n}")
    eps = epsilon_rep(QQ, m, n, n - 1)
    eps_f = np.array([[float(x) for x in row] for row in eps.entries])
    cell = np.diag(np.concatenate([t, [1.0]]))
    return eps_f @ np.kron(np.eye(m), cell)


def _mirabolic_delta(x_p: np.ndarray) -> float:
    """Modulus character of the triangular factor: |det of the head block|
    times corner^(-(size-1))."""
    diag = np.diag(x_p)
    corner = diag[-1]
    return float(np.abs(np.prod(diag[:-1])) * corner ** (-(len(diag) - 1)))


@dataclass(frozen=True)
class SectionExponents:
    det_power: float
    phi_power: float
    alpha: float
    delta_value: float


def section_value_exponents(m: int, n: int, t) -> SectionExponents:
    """Factor the embedded cell matrix and read off the exponent law.

    Asserts the corner entry of the triangular factor equals sqrt(phi_1)
    and that its modulus character equals |det t|^m phi_1^(-mn/2), both to
    1e-10 relative.  The reported powers are measured, not assumed: the
    modulus value is extracted from the section exponent at two values of
    the complex parameter, and the pair (det-power, phi-power) is solved
    from this point together with the componentwise-squared point.
    """
    if n > m:
        raise DomainError(f"need n <= m, got n = {n} > m = {m}")
    t = _validate_point(t)

    if n == 1:
        # trivial cell: the embedded matrix is the identity, so alpha = 1
        # and the modulus is 1; every exponent pair fits and the minimal
        # one is reported
        factors = iwasawa_numeric(embedded_cell_matrix(m, 1, t))
        alpha = factors.x_p[-1, -1]
        delta = _mirabolic_delta(factors.x_p)
        if abs(alpha - 1.0) > CLOSED_FORM_TOL or abs(delta - 1.0) > CLOSED_FORM_TOL:
            raise AssertionFailed(f"trivial cell gave alpha {alpha}, delta {delta}")
        return SectionExponents(0.0, 0.0, float(alpha), float(delta))

    def measure(point):
        mat = embedded_cell_matrix(m, n, point)
        factors = iwasawa_numeric(mat)
        delta = _mirabolic_delta(factors.x_p)
        # read log(delta) back from delta^(s + 1/2) at s = 0 and s = 1
        log_delta = np.log(delta**1.5) - np.log(delta**0.5)
        alpha = factors.x_p[-1, -1]
        return alpha, delta, log_delta

    alpha, delta, log_delta = measure(t)
    phi1 = 1.0 + float(np.sum(t * t))
    predicted_alpha = np.sqrt(phi1)
    det_t = float(np.prod(t))
    predicted_delta = det_t**m * phi1 ** (-m * n / 2.0)
    if abs(alpha - predicted_alpha) > CLOSED_FORM_TOL * abs(predicted_alpha):
        raise AssertionFailed(
            f"corner entry {alpha} vs sqrt(phi_1) = {predicted_alpha}"
        )
    if abs(delta - predicted_delta) > CLOSED_FORM_TOL * abs(predicted_delta):
        raise AssertionFailed(
            f"modulus {delta} vs |det t|^m phi_1^(-mn/2) = {predicted_delta}"
        )

    t2 = t * t
    _, _, log_delta2 = measure(t2)
    phi1_2 = 1.0 + float(np.sum(t2 * t2))
    system = np.array(
        [
            [np.log(det_t), np.log(phi1)],
            [np.log(float(np.prod(t2))), np.log(phi1_2)],
        ]
    )
    if abs(np.linalg.det(system)) < 1e-12:
        raise DomainError(
            "exponent measurement is degenerate (|det t| = 1); "
            "pick a point with determinant away from 1"
        )
    powers = np.linalg.solve(system, np.array([log_delta, log_delta2]))
    return SectionExponents(
        det_power=float(powers[0]),
        phi_power=float(powers[1]),
        alpha=float(alpha),
        delta_value=float(delta),
    )
