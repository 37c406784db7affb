"""Exception types shared across the package."""


class QsdpiError(Exception):
    """Base class for all package errors."""


class NonHermitian(QsdpiError):
    pass


class DimensionMismatch(QsdpiError):
    pass


class FunctionUndefined(QsdpiError):
    pass


class InvalidParameter(QsdpiError):
    pass


class SupportViolation(QsdpiError):
    pass


class SingularSigma(QsdpiError):
    pass


class SingularReference(SingularSigma):
    pass


class OutOfRange(QsdpiError):
    pass


class SolverFailure(QsdpiError):
    pass


class NumericalFailure(SolverFailure):
    pass


class DegenerateInput(QsdpiError):
    pass


class NoClosedForm(QsdpiError):
    pass


class MissingLeafCoefficient(QsdpiError):
    pass


class NotInvertible(QsdpiError):
    pass


class OptimizerStall(QsdpiError):
    pass


class DimensionTooLarge(QsdpiError):
    pass


class UnknownKind(QsdpiError):
    pass


class DivisionUndefined(QsdpiError):
    pass


class CutoffTooSmall(QsdpiError):
    pass


class NonPositiveEnergy(QsdpiError):
    pass


class NotPrimitive(QsdpiError):
    pass


class KernelMismatch(QsdpiError):
    pass
