"""Shared exception types. CLI exit codes map onto this hierarchy."""


class ImkError(Exception):
    """Base class for all toolkit errors."""


class InputError(ImkError):
    """Malformed user input: files, expressions, dimensions. CLI exit 2."""


class ExprSyntaxError(InputError):
    """Expression text does not conform to the grammar."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(InputError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} (at offset {offset})")
        self.name = name
        self.offset = offset


class DimensionError(InputError):
    """Inconsistent dimensions between expressions, fields, or matrices."""


class ExprDomainError(ImkError):
    """Evaluation or normalization hit an undefined operation (ln<=0, /0)."""

    def __init__(self, reason: str, subexpr: str = ""):
        msg = reason if not subexpr else f"{reason} in subexpression {subexpr}"
        super().__init__(msg)
        self.reason = reason
        self.subexpr = subexpr


class NumericalError(ImkError):
    """Numerical procedure failed (nonconvergence, underflow...). CLI exit 3."""


class InconclusiveError(NumericalError):
    """Sampling could not reach a verdict (all points failed or near-zero)."""


class DivergenceError(NumericalError):
    """Integration step size underflowed or the state blew up."""

    def __init__(self, message: str, t: float, state):
        super().__init__(f"{message} (t={t:.6g})")
        self.t = t
        self.state = state


class AssumptionViolationError(ImkError):
    """A structural hypothesis needed by a construction does not hold."""


class NoInternalModelError(ImkError):
    """The exosystem polynomial does not divide the system zeros polynomial."""


class NoEmbeddingError(ImkError):
    """No linear map matches the internal-model output to the exosystem output."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class DecompositionError(ImkError):
    """Feedback decomposition undefined (zero numerator)."""


class NonConstantTauError(AssumptionViolationError):
    """Normal-form construction requires constant commuting direction fields."""
