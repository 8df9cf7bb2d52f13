"""Exception types shared across the package."""


class TrigZerosError(Exception):
    """Base class for all package errors."""


class FactorUnavailable(TrigZerosError):
    """The scheme admits no deterministic cosine prefactor."""


class NonIntegerZeroCount(TrigZerosError):
    """cos(q*x) has a non-integer number of zeros on (0, 2*pi)."""


class NearSingularArgument(TrigZerosError):
    """Closed Dirichlet form requested too close to a zero of sin(x)."""


class EmptyInterval(TrigZerosError):
    """The probe interval [m^-a, pi/p - m^-a] is empty."""


class UnsupportedScheme(TrigZerosError):
    """No closed leading-order kernel form exists for this scheme."""


class VanishingA(TrigZerosError):
    """Kernel A(x) vanishes (or nearly so); the zero density is undefined there."""


class QuadratureNotConverged(TrigZerosError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class NotBracketed(TrigZerosError):
    """Bisection endpoints do not bracket a sign change."""


class DegenerateInput(TrigZerosError):
    """All coefficients are zero; zero counting is undefined."""


class InvalidConfig(TrigZerosError):
    """Experiment configuration cannot produce a meaningful run."""
