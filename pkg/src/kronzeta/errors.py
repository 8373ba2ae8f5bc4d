"""Exception hierarchy shared by all kronzeta modules."""


class KronzetaError(Exception):
    """Base class for all errors raised by this package."""


class ZeroConstantTerm(KronzetaError):
    """Series or denominator has zero constant term, so no inverse exists."""


class DimensionMismatch(KronzetaError):
    """Matrix dimensions incompatible with the requested operation."""


class RingMismatch(KronzetaError):
    """Operands live over different coefficient rings."""


class IndexOutOfRange(KronzetaError):
    """Row/position index outside the valid range."""


class RankOutOfRange(KronzetaError):
    """Double-coset rank label outside {0, ..., n-1} or shape n > m."""


class NotInParabolic(KronzetaError):
    """Matrix is not block upper-triangular of the requested shape."""


class SingularBlock(KronzetaError):
    """A Levi block that must be invertible is singular."""


class SingularMatrix(KronzetaError):
    """Matrix is not invertible."""


class BudgetExceeded(KronzetaError):
    """Enumeration size exceeds the configured budget."""


class NonDominant(KronzetaError):
    """Exponent tuple is not nonincreasing and nonnegative."""


class NonRegularSatake(KronzetaError):
    """Satake parameters collide; the spherical formula needs distinct ones."""


class BadShape(KronzetaError):
    """Group sizes violate the required n <= m constraint."""


class IdentityFailed(KronzetaError):
    """An exact identity check found a mismatching coefficient."""

    def __init__(self, message, first_mismatch=None):
        super().__init__(message)
        self.first_mismatch = first_mismatch


class DomainError(KronzetaError):
    """Real torus point outside the domain 0 < t_1 <= ... <= t_{n-1} <= 1."""


class AssertionFailed(KronzetaError):
    """A numerical assertion missed its tolerance."""


class ConfigError(KronzetaError):
    """Invalid run configuration."""


class IoError(KronzetaError):
    """Report emission failed."""
