"""Exception hierarchy shared by all covert_sense modules.

The CLI maps these onto exit codes: validation problems (bad arguments,
out-of-range parameters) exit 2, numerical problems exit 3, I/O exits 4.
"""


class CovertSenseError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(CovertSenseError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(CovertSenseError, ValueError):
    """Inputs are individually valid but jointly outside a formula's domain."""


class PhysicalityViolationError(CovertSenseError, ValueError):
    """A state (or derived spectrum) violates the uncertainty relation."""


class NumericalFailureError(CovertSenseError, RuntimeError):
    """A numerical routine could not reach its accuracy contract."""


class StepUnderflowError(NumericalFailureError):
    """Finite-difference step too small for the available precision."""


class UndefinedAngleError(CovertSenseError, ValueError):
    """Angle of the zero vector requested."""
