"""Exception hierarchy shared by every module of the package."""


class HLRCError(Exception):
    """Base class for all errors raised by :mod:`hlrc`."""


# -- field arithmetic -------------------------------------------------------

class NotPrime(HLRCError, ValueError):
    pass


class ReducibleModulus(HLRCError, ValueError):
    pass


class CardinalityCapExceeded(HLRCError, ValueError):
    pass


class DivisionByZero(HLRCError, ZeroDivisionError):
    pass


class FieldMismatch(HLRCError, TypeError):
    pass


class LambdaDivisibleByCharacteristic(HLRCError, ValueError):
    pass


class LambdaNotDividingGroupOrder(HLRCError, ValueError):
    pass


class UnsupportedLHS(HLRCError, ValueError):
    pass


# -- surfaces and codes -----------------------------------------------------

class InvalidSurface(HLRCError, ValueError):
    pass


class EmptyGammaSet(HLRCError, ValueError):
    pass


class RhoOutOfRange(HLRCError, ValueError):
    pass


class Condition2Violated(HLRCError, ValueError):
    pass


class RankDeficient(HLRCError, ArithmeticError):
    pass


# -- recovery ---------------------------------------------------------------

class RecoveryError(HLRCError):
    """A position could not be recovered at the requested level."""


class InsufficientSurvivors(RecoveryError):
    pass


class InsufficientBuckets(RecoveryError):
    pass


class RecoveryMismatch(HLRCError, AssertionError):
    """A recovered value disagreed with the supplied ground truth."""


# -- verification -----------------------------------------------------------

class BudgetExceeded(HLRCError):
    pass


class AuditFailure(HLRCError):
    """Base for failed audits; carries the audit record that failed."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class BoundViolated(AuditFailure):
    pass


class FormulaMismatch(AuditFailure):
    pass


class CensusMismatch(AuditFailure):
    pass


# -- cli --------------------------------------------------------------------

class ConfigInvalid(HLRCError, ValueError):
    pass
