"""Exception types shared across the package."""


class QzwError(Exception):
    """Base class for all package-specific errors."""


class BadOrder(QzwError):
    """Points that were required to be strictly increasing are not."""


class SizeMismatch(QzwError):
    """Configurations whose sizes are incompatible for the requested operation."""


class Nonconvergent(QzwError):
    """A series or product failed to meet its certified error bound."""


class PoleInC(QzwError):
    """A lower parameter of a basic hypergeometric series hit q^{-k} before termination."""


class ZeroArgument(QzwError):
    """An argument that must be nonzero was zero."""


class InvalidParams(QzwError):
    """Parameter values violate an admissibility or classification requirement."""


class BudgetExceeded(QzwError):
    """A sampling or enumeration budget was exhausted before the target accuracy."""


class PrefixTooShort(QzwError):
    """A boundary-point prefix is too short for the requested approximation level."""


class DuplicatePoints(QzwError):
    """A point set that must consist of distinct points contains repeats."""


class WindowTooSmall(QzwError):
    """A truncation window failed to capture the required mass."""


class QuadratureDisagreement(QzwError):
    """Two independent numerical routes for the same quantity disagree."""


class HypothesisViolated(QzwError):
    """Inputs violate the standing hypotheses of an asymptotic statement."""


class NoConvergentRepresentation(QzwError):
    """No parameter swap yields a convergent series representation."""


class NegativeUnderSqrt(QzwError):
    """A quantity that must be a nonnegative real under a square root is not."""


class PoleAtPoint(QzwError):
    """A weight or kernel was evaluated at a pole."""


class PoleInDenominator(PoleInC):
    """A terminating polynomial evaluation hit a denominator zero before its last term."""


class ConfigError(QzwError):
    """A run configuration file is malformed or inconsistent."""


class CheckFailed(QzwError):
    """A verification check did not meet its tolerance."""
