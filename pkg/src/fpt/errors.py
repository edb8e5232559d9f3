"""Exception hierarchy.

Two families matter to callers: :class:`ConfigError` (bad input, usage)
and :class:`NumericalError` (a computation could not be carried out to
the requested accuracy).  The command line maps them to exit codes 2 and 1.
"""


class FPTError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(FPTError, ValueError):
    """Invalid input: arguments, configuration files, drift definitions."""


class NumericalError(FPTError, ArithmeticError):
    """A numerical routine failed or could not certify its result."""


# drift
class NonMonotoneBreakpoints(ConfigError):
    pass


class DiscontinuousDrift(ConfigError):
    pass


class NonConstantTail(ConfigError):
    pass


class EmptyDomain(ConfigError):
    pass


class UnboundedValue(NumericalError):
    pass


class SigmaVanishes(NumericalError):
    pass


class QuadratureFail(NumericalError):
    pass


# specfun
class PoleAtNonPositiveInteger(NumericalError):
    pass


class BNonPositiveInteger(ConfigError):
    pass


class SeriesDiverged(NumericalError):
    pass


# lapsolve
class NonpositiveLambda(ConfigError):
    pass


class DegenerateSeed(NumericalError):
    pass


class SingularBasisMatrix(NumericalError):
    pass


class BarrierNotAbove(ConfigError):
    pass


class TooCloseToBreakpoint(ConfigError):
    pass


class StepUnderflow(NumericalError):
    pass


# invert
class InversionUnstable(NumericalError):
    pass


class NegativeDensity(NumericalError):
    pass


class MonotonicityViolation(NumericalError):
    pass


# mc
class InvalidConfig(ConfigError):
    pass


# cli
class ExpressionSyntaxError(ConfigError):
    """Parse failure; ``offset`` is the byte offset of the offending token."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(ConfigError):
    pass


class MissingField(ConfigError):
    pass


class UnknownField(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class ConstraintViolation(ConfigError):
    pass


class SinkError(FPTError, OSError):
    pass
