"""Exception hierarchy shared by every module of the package."""


class TeleportError(Exception):
    """Base class for all errors raised by qutrit_teleport."""


class ShapeError(TeleportError, ValueError):
    """Operands have incompatible dimensions or an invalid factor index."""


class DomainError(TeleportError, ValueError):
    """An argument lies outside its documented range."""


class DegenerateInputError(DomainError):
    """A state vector is zero (or numerically so) and cannot be normalized."""


class ContractViolation(TeleportError, ValueError):
    """An input fails a documented precondition (Hermiticity, normalization)."""


class NumericalError(TeleportError, ArithmeticError):
    """An iterative routine failed to converge or a cross-check disagreed."""


class StructureError(TeleportError, AssertionError):
    """A projected state does not have the expected monomial structure."""


class ConfigurationError(TeleportError, ValueError):
    """Incompatible combination of protocol options."""
