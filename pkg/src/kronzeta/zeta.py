"""Unramified local engine: Satake parameters, L-factors, the spherical
matrix coefficient (Macdonald's sum over the Weyl group), the section value
on the dominant torus, and the two torus sums whose closed forms are checked
coefficient by coefficient.

Everything is exact: series coefficients live in Q(sqrt q) because both the
spherical coefficient and the section value involve q^(1/2) powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

from .errors import BadShape, IdentityFailed, NonRegularSatake
from .padic import DominantCochar, enumerate_dominant, macdonald_measure
from .rings import (
    LaurentPoly,
    QRoot,
    RationalFunction,
    TruncatedSeries,
    is_prime,
)


@dataclass(frozen=True)
class SatakeParams:
    """The n nonzero exact scalars classifying an unramified representation
    of GL_n, together with the residue cardinality q.

    Unitarity is deliberately not enforced: every identity verified here is
    algebraic in the parameters, so arbitrary nonzero exact values give a
    strictly stronger check.
    """

    alphas: tuple
    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError(f"q = {self.q} is not prime")
        lifted = tuple(QRoot.of(a, self.q) for a in self.alphas)
        if any(a.is_zero() for a in lifted):
            raise ValueError("Satake parameters must be nonzero")
        object.__setattr__(self, "alphas", lifted)

    @property
    def n(self) -> int:
        return len(self.alphas)

    @property
    def is_regular(self) -> bool:
        return len(set(self.alphas)) == self.n

    def require_regular(self):
        if not self.is_regular:
            raise NonRegularSatake(f"parameters collide: {self.alphas}")

    def omega(self) -> QRoot:
        """Central character value at the uniformizer: the product of the
        parameters."""
        out = QRoot.of(1, self.q)
        for a in self.alphas:
            out = out * a
        return out


@dataclass(frozen=True)
class CentralCharValue:
    omega: QRoot

    def __post_init__(self):
        if self.omega.is_zero():
            raise ValueError("central character value must be nonzero")


def _as_omega(omega, q: int) -> QRoot:
    if isinstance(omega, CentralCharValue):
        return QRoot.of(omega.omega, q)
    if isinstance(omega, SatakeParams):
        return omega.omega()
    return QRoot.of(omega, q)


def _half_power(q: int, b: Fraction) -> QRoot:
    """q^(-b) for half-integral b."""
    twice = Fraction(b) * 2
    if twice.denominator != 1:
        raise ValueError(f"shift {b} is not half-integral")
    return QRoot.sqrt_power(q, -int(twice))


# ---------------------------------------------------------------------------
# L-factors and the center factor
# ---------------------------------------------------------------------------


def l_factor(params: SatakeParams, a: int, b) -> RationalFunction:
    """L-factor after the shift s -> a*s + b: denominator
    prod_i (1 - alpha_i q^(-b) X^a), numerator 1."""
    if a < 1:
        raise ValueError("shift multiplier a must be >= 1")
    q = params.q
    scale = _half_power(q, Fraction(b))
    den = LaurentPoly.one(q)
    for alpha in params.alphas:
        factor = LaurentPoly({0: QRoot.of(1, q), a: -(alpha * scale)}, q)
        den = den * factor
    return RationalFunction(LaurentPoly.one(q), den)


def omega_l_factor(omega, q: int, a: int, b) -> RationalFunction:
    """L-factor of the central character: 1 / (1 - omega q^(-b) X^a)."""
    om = _as_omega(omega, q)
    return l_factor(SatakeParams((om,), q), a, b)


def center_factor(n: int, omega, order: int, q: int) -> TruncatedSeries:
    """Geometric series from integrating the characteristic function of
    integral matrices over the center: sum_j omega^j q^(-j n(n-1)/2) X^(jn).

    Equals the expansion of the omega L-factor with a = n, b = n(n-1)/2.
    """
    om = _as_omega(omega, q)
    step = _half_power(q, Fraction(n * (n - 1), 2))
    coeffs = [QRoot.of(0, q)] * (order + 1)
    term = QRoot.of(1, q)
    j = 0
    while j * n <= order:
        coeffs[j * n] = term
        term = term * om * step
        j += 1
    return TruncatedSeries(coeffs, order, q)


# ---------------------------------------------------------------------------
# Spherical matrix coefficient (Macdonald's formula)
# ---------------------------------------------------------------------------


def weyl_poincare(n: int, q: int) -> Fraction:
    """Sum over the symmetric group of q^(-length): [n]_x! at x = 1/q."""
    x = Fraction(1, q)
    out = Fraction(1)
    for i in range(2, n + 1):
        out *= sum(x**k for k in range(i))
    return out


def spherical_value(lam: Sequence[int], params: SatakeParams) -> QRoot:
    """Normalized spherical matrix coefficient at the full dominant
    cocharacter lam = (lam_1 >= ... >= lam_n >= 0).

    Macdonald's sum: delta_B^(1/2)(lam) / W(1/q) times
    sum over permutations w of
      prod_{i<j} (w(alpha)_i - q^(-1) w(alpha)_j) / (w(alpha)_i - w(alpha)_j)
      * prod_i w(alpha)_i^{lam_i}.
    The value at lam = 0 is exactly 1.
    """
    params.require_regular()
    q = params.q
    n = params.n
    if len(lam) != n:
        raise BadShape(f"cocharacter length {len(lam)} != n = {n}")
    qinv = QRoot.of(Fraction(1, q), q)
    total = QRoot.of(0, q)
    for w in permutations(params.alphas):
        num = QRoot.of(1, q)
        den = QRoot.of(1, q)
        for i in range(n):
            for j in range(i + 1, n):
                num = num * (w[i] - qinv * w[j])
                den = den * (w[i] - w[j])
        mono = QRoot.of(1, q)
        for i in range(n):
            mono = mono * w[i] ** lam[i]
        total = total + num / den * mono
    half_sum = sum((n - 2 * (i + 1) + 1) * lam[i] for i in range(n))
    delta_half = QRoot.sqrt_power(q, -half_sum)
    return delta_half * total / QRoot.of(weyl_poincare(n, q), q)


def spherical_coeff(t, params: SatakeParams) -> QRoot:
    """Spherical coefficient at the center-normalized cell diag(pi^r, 1)."""
    cochar = t if isinstance(t, DominantCochar) else DominantCochar(tuple(t))
    if cochar.n != params.n:
        raise BadShape(f"cell for n = {cochar.n} but {params.n} parameters")
    return spherical_value(cochar.full(), params)


# ---------------------------------------------------------------------------
# Section value on the torus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    degree: int
    scalar: QRoot


def section_value_on_torus(m: int, n: int, t, q: int) -> Monomial:
    """Value of the normalized section at the embedded cell: the monomial
    X^(m * sum r_i) * q^(-(m/2) * sum r_i)."""
    cochar = t if isinstance(t, DominantCochar) else DominantCochar(tuple(t))
    if n > m:
        raise BadShape(f"need n <= m, got n = {n} > m = {m}")
    if cochar.n != n:
        raise BadShape(f"cell for n = {cochar.n}, expected {n}")
    total = cochar.total()
    return Monomial(degree=m * total, scalar=QRoot.sqrt_power(q, -m * total))


# ---------------------------------------------------------------------------
# Torus sums and their ledgers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LedgerRow:
    exps: tuple
    mu: Fraction
    spherical: QRoot
    degree: int
    contribution: QRoot
    partial_sum: QRoot


@dataclass(frozen=True)
class TorusSummandLedger:
    """Audit trail: one row per Cartan cell, in sorted cell order, plus the
    assembled series."""

    kind: str
    m: Optional[int]
    n: int
    q: int
    order: int
    rows: tuple
    series: TruncatedSeries


def _cell_sum(
    params: SatakeParams,
    order: int,
    degree_scale: int,
    scalar_half_exponent: int,
    height: int,
) -> tuple:
    """Shared cell loop: sum over dominant cells of
    mu(t) * c(t) * q^(scalar_half_exponent * sum_r / 2) X^(degree_scale * sum_r),
    truncated to the order.  Returns (series, ledger rows)."""
    q = params.q
    n = params.n
    coeffs = [QRoot.of(0, q)] * (order + 1)
    rows = []
    running = QRoot.of(0, q)
    for cell in enumerate_dominant(n, height):
        total = cell.total()
        degree = degree_scale * total
        if degree > order:
            continue
        mu = macdonald_measure(cell, n, q)
        coeff = spherical_coeff(cell, params)
        scalar = QRoot.sqrt_power(q, scalar_half_exponent * total)
        contribution = mu * coeff * scalar
        coeffs[degree] = coeffs[degree] + contribution
        running = running + contribution
        rows.append(
            LedgerRow(
                exps=cell.exps,
                mu=mu.a,
                spherical=coeff,
                degree=degree,
                contribution=contribution,
                partial_sum=running,
            )
        )
    return TruncatedSeries(coeffs, order, q), rows


def gj_torus_ledger(params: SatakeParams, order: int) -> TorusSummandLedger:
    """Torus-sum form of the Godement-Jacquet integral at spherical data.

    Cells contribute mu(t) c(t) X^(sum r) q^(-(n-1)/2 sum r); the center
    integral contributes the geometric center factor.  A cell with
    sum r = d only touches degrees >= d, so height = order is complete.
    """
    params.require_regular()
    n = params.n
    cell_series, rows = _cell_sum(
        params,
        order,
        degree_scale=1,
        scalar_half_exponent=-(n - 1),
        height=order,
    )
    series = cell_series * center_factor(n, params, order, params.q)
    return TorusSummandLedger(
        kind="gj",
        m=None,
        n=n,
        q=params.q,
        order=order,
        rows=tuple(rows),
        series=series,
    )


def zeta_gj_torus_sum(params: SatakeParams, order: int) -> TruncatedSeries:
    return gj_torus_ledger(params, order).series


def local_torus_ledger(m: int, params: SatakeParams, order: int) -> TorusSummandLedger:
    """Torus-sum form of the local integral at the identity: cells contribute
    mu(t) c(t) X^(m sum r) q^(-(m/2) sum r); no center factor.  A cell with
    sum r = d only touches degree m*d, so height = ceil(order/m) is complete.
    """
    params.require_regular()
    n = params.n
    if n > m:
        raise BadShape(f"need n <= m, got n = {n} > m = {m}")
    height = math.ceil(order / m)
    series, rows = _cell_sum(
        params,
        order,
        degree_scale=m,
        scalar_half_exponent=-m,
        height=height,
    )
    return TorusSummandLedger(
        kind="local",
        m=m,
        n=n,
        q=params.q,
        order=order,
        rows=tuple(rows),
        series=series,
    )


def local_integral_torus_sum(m: int, params: SatakeParams, order: int) -> TruncatedSeries:
    return local_torus_ledger(m, params, order).series


# ---------------------------------------------------------------------------
# Identity checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GJReport:
    params: SatakeParams
    order: int
    passed: bool
    first_mismatch: Optional[int]
    ledger: TorusSummandLedger
    closed_form: TruncatedSeries


def verify_gj_identity(params: SatakeParams, order: int) -> GJReport:
    """Assert the torus sum reproduces prod_i (1 - alpha_i X)^{-1} exactly."""
    ledger = gj_torus_ledger(params, order)
    closed = l_factor(params, 1, 0).expand(order)
    first = ledger.series.first_difference(closed)
    if first is not None:
        raise IdentityFailed(
            f"torus sum differs from the L-factor at X^{first}: "
            f"{ledger.series.coefficient(first)} vs {closed.coefficient(first)}",
            first_mismatch=first,
        )
    return GJReport(
        params=params,
        order=order,
        passed=True,
        first_mismatch=None,
        ledger=ledger,
        closed_form=closed,
    )


@dataclass(frozen=True)
class VariantResult:
    name: str
    matches: bool
    first_mismatch: Optional[int]
    series: TruncatedSeries


@dataclass(frozen=True)
class LocalIdentityReport:
    m: int
    params: SatakeParams
    order: int
    torus_sum: TruncatedSeries
    variant_a: VariantResult
    variant_b: VariantResult
    ledger: TorusSummandLedger

    @property
    def matched_variant(self) -> Optional[str]:
        if self.variant_a.matches:
            return "A"
        if self.variant_b.matches:
            return "B"
        return None


def _ratio_series(
    params: SatakeParams, num_a: int, num_b, den_a: int, den_b, order: int
) -> TruncatedSeries:
    """Expansion of L(num_a*s + num_b, pi) / L(den_a*s + den_b, omega)."""
    numerator_factor = l_factor(params, num_a, num_b)
    omega_factor = omega_l_factor(params, params.q, den_a, den_b)
    # L_pi / L_omega = (denominator poly of L_omega) / (denominator poly of L_pi)
    ratio = RationalFunction(omega_factor.denominator, numerator_factor.denominator)
    return ratio.expand(order)


def verify_local_identity(m: int, params: SatakeParams, order: int) -> LocalIdentityReport:
    """Compare the local torus sum against both candidate closed forms.

    Variant A divides by the central L-factor at mn(s + 1/2), the form
    forced by substituting the shifted variable into the center-divided
    zeta identity.  Variant B divides by the L-factor at m(s + 1/2)
    instead.  Both are computed and reported; IdentityFailed is raised only
    when neither matches to the requested order.
    """
    ledger = local_torus_ledger(m, params, order)
    n = params.n
    num_b = Fraction(m - n + 1, 2)
    series_a = _ratio_series(params, m, num_b, m * n, Fraction(m * n, 2), order)
    series_b = _ratio_series(params, m, num_b, m, Fraction(m, 2), order)
    first_a = ledger.series.first_difference(series_a)
    first_b = ledger.series.first_difference(series_b)
    report = LocalIdentityReport(
        m=m,
        params=params,
        order=order,
        torus_sum=ledger.series,
        variant_a=VariantResult("A", first_a is None, first_a, series_a),
        variant_b=VariantResult("B", first_b is None, first_b, series_b),
        ledger=ledger,
    )
    if first_a is not None and first_b is not None:
        raise IdentityFailed(
            f"neither closed form matches: A at X^{first_a}, B at X^{first_b}",
            first_mismatch=min(first_a, first_b),
        )
    return report
