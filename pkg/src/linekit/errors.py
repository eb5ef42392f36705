"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front-end:
1 for configuration problems, 2 for geometric/domain failures and 3 for
numerical breakdown.
"""


class LinekitError(Exception):
    exit_code = 2


class ConfigError(LinekitError):
    exit_code = 1

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(LinekitError):
    exit_code = 2


class NumericalError(LinekitError):
    exit_code = 3


class NonFiniteSample(NumericalError):
    pass


class Blowup(NumericalError):
    def __init__(self, s, message=None):
        self.s = s
        super().__init__(message or f"non-finite state at s={s!r}")


class UndersampledCurve(NumericalError):
    pass


class ChartSingularity(DomainError):
    pass


class ParameterSingularity(DomainError):
    pass


class NoHelicoid(DomainError):
    pass


class PlanePencil(DomainError):
    pass


class Caustic(DomainError):
    pass


class AmbiguousSignature(DomainError):
    pass


class NotClosed(DomainError):
    pass


class NonIsolated(DomainError):
    pass


class ResolutionLimit(DomainError):
    pass


class CurveHitsComplexPoint(DomainError):
    pass
