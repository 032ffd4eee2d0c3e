"""Exception hierarchy shared by the whole package."""


class PluripotError(Exception):
    """Base class for all package errors."""


class UsageError(PluripotError):
    """Invalid configuration or argument combination."""


class FlatMeshError(PluripotError):
    """A point set is degenerate along some coordinate (min == max)."""


class DomainError(PluripotError):
    """A point falls outside the domain required by the evaluation mode."""


class SizeError(PluripotError):
    """A requested problem size is not representable or not feasible."""


class UndersamplingError(PluripotError):
    """A mesh parameter is too small to norm the requested degree."""


class NonUnisolventMeshError(PluripotError):
    """The mesh does not determine the polynomial space (rank deficiency)."""


class DegenerateWeightError(PluripotError):
    """A Bergman weight underflowed to (numerical) zero."""


class IllConditioningError(PluripotError):
    """A factorization is too ill-conditioned to be meaningful."""


class NoReferenceAvailableError(PluripotError):
    """No closed-form extremal function is known for the requested set."""


class GridConfigError(PluripotError):
    """The evaluation grid is incompatible with the requested computation."""


class NoAccelerantAvailableError(PluripotError):
    """Every entry of the requested extrapolation selection is invalid."""


class ConditioningWarning(UserWarning):
    """A triangular solve had a large estimated condition number."""


class OraclePrecisionWarning(UserWarning):
    """A finite-difference oracle detected cancellation at the given step."""
