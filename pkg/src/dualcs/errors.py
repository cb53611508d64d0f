"""Exception hierarchy shared by every module of the package."""


class DualCSError(Exception):
    """Base class for all library errors."""


class DomainError(DualCSError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ParameterError(DomainError):
    """Model parameters violate a positivity or integrability requirement."""


class DivergenceError(DualCSError, ArithmeticError):
    """A series is evaluated outside its region of convergence."""


class NonConvergenceError(DualCSError, ArithmeticError):
    """A series or iteration did not settle within its term cap."""


class TruncationError(DualCSError):
    """The Fock-space truncation cap was hit before the tail target."""


class MismatchError(DualCSError, ValueError):
    """Two objects that must share family, model or truncation do not."""


class DegenerateError(DualCSError, ArithmeticError):
    """A quantity is undefined because its denominator vanishes."""


class UnsupportedClassError(DualCSError, NotImplementedError):
    """The model does not belong to a weight class with a closed form."""


class SupportError(DomainError):
    """A point falls outside the support of a weight function."""


class QuadratureError(DualCSError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class TailNotConvergedError(DualCSError, ArithmeticError):
    """A truncated thermal sum has a tail bound above tolerance."""
