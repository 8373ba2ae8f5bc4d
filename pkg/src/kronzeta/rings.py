"""Exact scalar and series arithmetic.

Scalars: arbitrary-precision rationals, the quadratic extension Q(sqrt q),
and prime fields F_q.  Series: Laurent polynomials and truncated power series
in the formal variable X = q^(-s), with coefficients in Q(sqrt q).

The extension by sqrt(q) is forced by half-integral shifts of s: a shift
s -> a*s + b with b in (1/2)Z acts on series by X -> X^a times the scalar
q^(-b), and q^(-1/2) is irrational.  Everything here is immutable and exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import RingMismatch, ZeroConstantTerm

RationalLike = Union[int, Fraction]


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def p_valuation(x: RationalLike, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = _as_fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is undefined")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# Q(sqrt q)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QRoot:
    """a + b*sqrt(q) with exact rational a, b and a fixed prime q.

    Since sqrt(q) is irrational, the representation is unique and equality
    is componentwise.  q is fixed per computation context; mixing values
    with different q raises RingMismatch.
    """

    a: Fraction
    b: Fraction
    q: int

    @staticmethod
    def of(value, q: int) -> "QRoot":
        """Lift an int, Fraction, or QRoot into Q(sqrt q)."""
        if isinstance(value, QRoot):
            if value.q != q:
                raise RingMismatch(f"QRoot over sqrt({value.q}) vs sqrt({q})")
            return value
        return QRoot(_as_fraction(value), Fraction(0), q)

    @staticmethod
    def sqrt_power(q: int, k: int) -> "QRoot":
        """q^(k/2) for any integer k (possibly negative)."""
        if k % 2 == 0:
            return QRoot(Fraction(q) ** (k // 2), Fraction(0), q)
        return QRoot(Fraction(0), Fraction(q) ** ((k - 1) // 2), q)

    def _coerce(self, other):
        if isinstance(other, QRoot):
            if other.q != self.q:
                raise RingMismatch(f"QRoot over sqrt({self.q}) vs sqrt({other.q})")
            return other
        if isinstance(other, (int, Fraction)):
            return QRoot(_as_fraction(other), Fraction(0), self.q)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QRoot(self.a + other.a, self.b + other.b, self.q)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QRoot(self.a - other.a, self.b - other.b, self.q)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return QRoot(-self.a, -self.b, self.q)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        # (a + b sqrt q)(c + d sqrt q) = (ac + bdq) + (ad + bc) sqrt q
        return QRoot(
            self.a * other.a + self.b * other.b * self.q,
            self.a * other.b + self.b * other.a,
            self.q,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QRoot":
        # conjugate over the norm a^2 - q b^2, nonzero unless a = b = 0
        norm = self.a * self.a - self.q * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt q)")
        return QRoot(self.a / norm, -self.b / norm, self.q)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = QRoot.of(1, self.q)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __float__(self):
        return float(self.a) + float(self.b) * float(self.q) ** 0.5

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt({self.q})"
        return f"{self.a}+{self.b}*sqrt({self.q})"


# ---------------------------------------------------------------------------
# Prime fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeFieldElem:
    """Residue in [0, q) for a prime q."""

    residue: int
    q: int

    def __post_init__(self):
        object.__setattr__(self, "residue", self.residue % self.q)

    def _coerce(self, other):
        if isinstance(other, PrimeFieldElem):
            if other.q != self.q:
                raise RingMismatch(f"F_{self.q} vs F_{other.q}")
            return other
        if isinstance(other, int):
            return PrimeFieldElem(other, self.q)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PrimeFieldElem(self.residue + other.residue, self.q)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PrimeFieldElem(self.residue - other.residue, self.q)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return PrimeFieldElem(-self.residue, self.q)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return PrimeFieldElem(self.residue * other.residue, self.q)

    __rmul__ = __mul__

    def inverse(self) -> "PrimeFieldElem":
        if self.residue == 0:
            raise ZeroDivisionError(f"inverse of 0 in F_{self.q}")
        return PrimeFieldElem(pow(self.residue, self.q - 2, self.q), self.q)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return PrimeFieldElem(pow(self.residue, k, self.q), self.q)

    def is_zero(self) -> bool:
        return self.residue == 0

    def __bool__(self):
        return self.residue != 0

    def __str__(self):
        return str(self.residue)


# ---------------------------------------------------------------------------
# Ring adapters (pluggable coefficient rings for ExactMatrix)
# ---------------------------------------------------------------------------


class RationalRing:
    """The field Q realized by fractions.Fraction."""

    name = "QQ"

    zero = Fraction(0)
    one = Fraction(1)

    def of(self, value):
        return _as_fraction(value)

    def from_int(self, k: int):
        return Fraction(k)

    def is_zero(self, x) -> bool:
        return x == 0

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalRing()


class PrimeField:
    """The field F_q for prime q."""

    def __init__(self, q: int):
        if not is_prime(q):
            raise ValueError(f"q = {q} is not prime")
        self.q = q
        self.name = f"F{q}"
        self.zero = PrimeFieldElem(0, q)
        self.one = PrimeFieldElem(1, q)

    def of(self, value):
        if isinstance(value, PrimeFieldElem):
            if value.q != self.q:
                raise RingMismatch(f"F_{value.q} element in F_{self.q}")
            return value
        if isinstance(value, int):
            return PrimeFieldElem(value, self.q)
        raise TypeError(f"cannot coerce {type(value).__name__} into F_{self.q}")

    def from_int(self, k: int):
        return PrimeFieldElem(k, self.q)

    def is_zero(self, x) -> bool:
        return x.residue == 0

    def elements(self):
        return (PrimeFieldElem(r, self.q) for r in range(self.q))

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    def __repr__(self):
        return self.name


class QRootRing:
    """The field Q(sqrt q)."""

    def __init__(self, q: int):
        if not is_prime(q):
            raise ValueError(f"q = {q} is not prime")
        self.q = q
        self.name = f"QRoot{q}"
        self.zero = QRoot.of(0, q)
        self.one = QRoot.of(1, q)

    def of(self, value):
        return QRoot.of(value, self.q)

    def from_int(self, k: int):
        return QRoot.of(k, self.q)

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def __eq__(self, other):
        return isinstance(other, QRootRing) and other.q == self.q

    def __hash__(self):
        return hash(("QRoot", self.q))

    def __repr__(self):
        return self.name


# ---------------------------------------------------------------------------
# Laurent polynomials over Q(sqrt q)
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Laurent polynomial in X with QRoot coefficients, as {degree: coeff}."""

    __slots__ = ("coeffs", "q")

    def __init__(self, coeffs: dict, q: int):
        self.q = q
        trimmed = {}
        for deg, c in coeffs.items():
            c = QRoot.of(c, q)
            if not c.is_zero():
                trimmed[int(deg)] = c
        self.coeffs = trimmed

    @staticmethod
    def from_terms(terms: Iterable[tuple], q: int) -> "LaurentPoly":
        acc: dict = {}
        for deg, c in terms:
            c = QRoot.of(c, q)
            if deg in acc:
                acc[deg] = acc[deg] + c
            else:
                acc[deg] = c
        return LaurentPoly(acc, q)

    @staticmethod
    def one(q: int) -> "LaurentPoly":
        return LaurentPoly({0: QRoot.of(1, q)}, q)

    @staticmethod
    def zero(q: int) -> "LaurentPoly":
        return LaurentPoly({}, q)

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return min(self.coeffs)

    def max_degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return max(self.coeffs)

    def coefficient(self, deg: int) -> QRoot:
        return self.coeffs.get(deg, QRoot.of(0, self.q))

    def _check(self, other: "LaurentPoly"):
        if self.q != other.q:
            raise RingMismatch(f"Laurent over sqrt({self.q}) vs sqrt({other.q})")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        acc = dict(self.coeffs)
        for deg, c in other.coeffs.items():
            acc[deg] = acc.get(deg, QRoot.of(0, self.q)) + c
        return LaurentPoly(acc, self.q)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({d: -c for d, c in self.coeffs.items()}, self.q)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            self._check(other)
            acc: dict = {}
            for d1, c1 in self.coeffs.items():
                for d2, c2 in other.coeffs.items():
                    d = d1 + d2
                    term = c1 * c2
                    acc[d] = acc.get(d, QRoot.of(0, self.q)) + term
            return LaurentPoly(acc, self.q)
        return LaurentPoly(
            {d: c * QRoot.of(other, self.q) for d, c in self.coeffs.items()}, self.q
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPoly)
            and self.q == other.q
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.q, tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for deg in sorted(self.coeffs):
            c = self.coeffs[deg]
            if deg == 0:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*X^{deg}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------


class TruncatedSeries:
    """Power series in X = q^(-s), exact modulo X^(order+1).

    Coefficients are QRoot values sharing a single q.  Binary operations
    truncate to the smaller order of the two operands.
    """

    __slots__ = ("coeffs", "order", "q")

    variable = "X"

    def __init__(self, coeffs: Sequence, order: int, q: int):
        if order < 0:
            raise ValueError("order must be nonnegative")
        lifted = [QRoot.of(c, q) for c in coeffs[: order + 1]]
        lifted.extend(QRoot.of(0, q) for _ in range(order + 1 - len(lifted)))
        self.coeffs = tuple(lifted)
        self.order = order
        self.q = q

    @staticmethod
    def from_scalar(value, order: int, q: int) -> "TruncatedSeries":
        return TruncatedSeries([QRoot.of(value, q)], order, q)

    @staticmethod
    def one(order: int, q: int) -> "TruncatedSeries":
        return TruncatedSeries.from_scalar(1, order, q)

    @staticmethod
    def zero(order: int, q: int) -> "TruncatedSeries":
        return TruncatedSeries([], order, q)

    @staticmethod
    def monomial(coeff, degree: int, order: int, q: int) -> "TruncatedSeries":
        coeffs = [QRoot.of(0, q)] * (order + 1)
        if 0 <= degree <= order:
            coeffs[degree] = QRoot.of(coeff, q)
        return TruncatedSeries(coeffs, order, q)

    def coefficient(self, k: int) -> QRoot:
        if k < 0 or k > self.order:
            raise IndexError(f"coefficient index {k} outside [0, {self.order}]")
        return self.coeffs[k]

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs[: order + 1], order, self.q)

    def _check(self, other: "TruncatedSeries") -> int:
        if self.q != other.q:
            raise RingMismatch(f"series over sqrt({self.q}) vs sqrt({other.q})")
        return min(self.order, other.order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._check(other)
        return TruncatedSeries(
            [self.coeffs[k] + other.coeffs[k] for k in range(n + 1)], n, self.q
        )

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = self._check(other)
        return TruncatedSeries(
            [self.coeffs[k] - other.coeffs[k] for k in range(n + 1)], n, self.q
        )

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries([-c for c in self.coeffs], self.order, self.q)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            n = self._check(other)
            zero = QRoot.of(0, self.q)
            out = [zero] * (n + 1)
            for i in range(n + 1):
                ci = self.coeffs[i]
                if ci.is_zero():
                    continue
                for j in range(n + 1 - i):
                    cj = other.coeffs[j]
                    if cj.is_zero():
                        continue
                    out[i + j] = out[i + j] + ci * cj
            return TruncatedSeries(out, n, self.q)
        scalar = QRoot.of(other, self.q)
        return TruncatedSeries([c * scalar for c in self.coeffs], self.order, self.q)

    __rmul__ = __mul__

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse modulo X^(order+1); needs coeffs[0] != 0."""
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise ZeroConstantTerm("series has zero constant term")
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = QRoot.of(0, self.q)
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-inv0 * acc)
        return TruncatedSeries(out, self.order, self.q)

    def is_one(self) -> bool:
        return self.coeffs[0] == QRoot.of(1, self.q) and all(
            c.is_zero() for c in self.coeffs[1:]
        )

    def first_difference(self, other: "TruncatedSeries"):
        """Smallest degree where the two series differ, or None."""
        n = self._check(other)
        for k in range(n + 1):
            if self.coeffs[k] != other.coeffs[k]:
                return k
        return None

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.q == other.q
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.q, self.order, self.coeffs))

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            parts.append(f"({c})" if k == 0 else f"({c})*X^{k}")
        if not parts:
            parts = ["0"]
        return " + ".join(parts) + f" + O(X^{self.order + 1})"


# ---------------------------------------------------------------------------
# Rational functions of X
# ---------------------------------------------------------------------------


class RationalFunction:
    """Quotient of Laurent polynomials in X over Q(sqrt q)."""

    __slots__ = ("numerator", "denominator", "q")

    def __init__(self, numerator: LaurentPoly, denominator: LaurentPoly):
        if denominator.is_zero():
            raise ZeroDivisionError("zero denominator")
        if numerator.q != denominator.q:
            raise RingMismatch("numerator and denominator over different q")
        self.numerator = numerator
        self.denominator = denominator
        self.q = numerator.q

    def expand(self, order: int) -> TruncatedSeries:
        """Power-series expansion to the given order by long division."""
        den = self.denominator
        if den.min_degree() != 0 or den.coefficient(0).is_zero():
            raise ZeroConstantTerm("denominator constant term is zero")
        num = self.numerator
        if not num.is_zero() and num.min_degree() < 0:
            raise ValueError("numerator has negative degrees; not a power series")
        d0_inv = den.coefficient(0).inverse()
        out = []
        zero = QRoot.of(0, self.q)
        for k in range(order + 1):
            acc = num.coefficient(k) if not num.is_zero() else zero
            for i in range(1, k + 1):
                di = den.coefficient(i)
                if not di.is_zero():
                    acc = acc - di * out[k - i]
            out.append(d0_inv * acc)
        return TruncatedSeries(out, order, self.q)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    def __str__(self):
        return f"({self.numerator}) / ({self.denominator})"


# ---------------------------------------------------------------------------
# Exact JSON serialization
# ---------------------------------------------------------------------------


def qroot_to_pairs(x: QRoot) -> list:
    """[a_num, a_den, b_num, b_den] with exact integers."""
    return [x.a.numerator, x.a.denominator, x.b.numerator, x.b.denominator]


def qroot_from_pairs(pairs: Sequence[int], q: int) -> QRoot:
    an, ad, bn, bd = pairs
    return QRoot(Fraction(an, ad), Fraction(bn, bd), q)


def series_to_json(f: TruncatedSeries) -> dict:
    return {
        "variable": f.variable,
        "q": f.q,
        "order": f.order,
        "coeffs": [qroot_to_pairs(c) for c in f.coeffs],
    }


def series_from_json(doc: dict) -> TruncatedSeries:
    q = doc["q"]
    coeffs = [qroot_from_pairs(p, q) for p in doc["coeffs"]]
    return TruncatedSeries(coeffs, doc["order"], q)


def laurent_to_json(p: LaurentPoly) -> dict:
    return {
        "q": p.q,
        "terms": [[d, qroot_to_pairs(c)] for d, c in sorted(p.coeffs.items())],
    }


def laurent_from_json(doc: dict) -> LaurentPoly:
    q = doc["q"]
    return LaurentPoly({d: qroot_from_pairs(p, q) for d, p in doc["terms"]}, q)


def rational_to_json(r: RationalFunction) -> dict:
    return {
        "numerator": laurent_to_json(r.numerator),
        "denominator": laurent_to_json(r.denominator),
    }


def rational_from_json(doc: dict) -> RationalFunction:
    return RationalFunction(
        laurent_from_json(doc["numerator"]), laurent_from_json(doc["denominator"])
    )


def dumps_sorted(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
