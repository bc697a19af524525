"""Exception taxonomy.

Every error raised by the package derives from :class:`SysPredictError` so the
CLI can report a machine-readable category (the class name) and exit nonzero.
"""


class SysPredictError(Exception):
    """Base class for all package errors."""


# -- structure validation -------------------------------------------------

class EmptyPaths(SysPredictError, ValueError):
    """No path sets given, or a path set is empty."""


class IndexOutOfRange(SysPredictError, ValueError):
    """A component index is outside 1..n."""


class NonMinimalPath(SysPredictError, ValueError):
    """One path set strictly contains another."""


class UncoveredComponent(SysPredictError, ValueError):
    """A component appears in no path set."""


class LengthMismatch(SysPredictError, ValueError):
    """A component-time vector has the wrong length."""


# -- copulas ---------------------------------------------------------------

class OutOfUnitInterval(SysPredictError, ValueError):
    """A copula argument lies outside [0, 1]."""


class IncompleteAssignment(SysPredictError, ValueError):
    """A slice assignment does not cover every coordinate."""


class UnsupportedOrder(SysPredictError, ValueError):
    """Partial derivative order outside 1..3 or repeated indices."""


class BoundaryTooClose(SysPredictError, ValueError):
    """Finite-difference stencil would leave the unit cube."""


class UnsupportedCopula(SysPredictError, ValueError):
    """Requested operation is not available for this copula family."""


# -- marginals -------------------------------------------------------------

class NegativeTime(SysPredictError, ValueError):
    """A lifetime argument is negative."""


class OutOfRange(SysPredictError, ValueError):
    """An argument lies outside its valid domain."""


# -- distortions -----------------------------------------------------------

class DimensionMismatch(SysPredictError, ValueError):
    """Structures and copula disagree on the number of components."""


class RegionError(SysPredictError, ValueError):
    """Evaluation point outside the supported region."""


class TermLimitExceeded(SysPredictError, ValueError):
    """Inclusion-exclusion expansion exceeds the term budget."""


class OrderingViolation(SysPredictError, ValueError):
    """Sampled lifetimes contradict the declared failure ordering."""


# -- predictors ------------------------------------------------------------

class DegenerateDenominator(SysPredictError, ZeroDivisionError):
    """Conditional-law denominator vanished at the conditioning point."""


class ZeroAlpha(SysPredictError, ZeroDivisionError):
    """Conditioning on survival is impossible: alpha(t) = 0."""


class NotInvertible(SysPredictError, ValueError):
    """Quantile inversion could not bracket the target level."""


class QuadratureFailure(SysPredictError, ArithmeticError):
    """Adaptive quadrature did not converge."""


class InvalidOrder(SysPredictError, ValueError):
    """k-out-of-n order statistic indices violate 1 <= r < s <= n."""


# -- monte carlo -----------------------------------------------------------

class InsufficientBinCount(SysPredictError, ValueError):
    """Too few sample rows fall inside the conditioning bin."""


class InvalidK(SysPredictError, ValueError):
    """Coverage experiment needs k >= 1 and replications >= 1."""


# -- quantile regression ---------------------------------------------------

class DegenerateDesign(SysPredictError, ValueError):
    """Regression needs at least two distinct abscissae."""


# -- CLI -------------------------------------------------------------------

class ConfigError(SysPredictError, ValueError):
    """Configuration document is invalid for the requested command."""
