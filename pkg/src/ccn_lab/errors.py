"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class CCNError(Exception):
    exit_code = 1


class DomainError(CCNError, ValueError):
    """Wavenumber outside the region where an operation is defined."""
    exit_code = 2


class OutsideExistenceError(DomainError):
    pass


class ComplexCharacteristicsError(DomainError):
    pass


class ParameterError(DomainError):
    pass


class DimensionError(CCNError, ValueError):
    exit_code = 2


class DegenerateCharacteristicsError(CCNError, ArithmeticError):
    exit_code = 3


class CoalescingCharacteristicsError(DegenerateCharacteristicsError):
    pass


class DegenerateReductionError(DegenerateCharacteristicsError):
    pass


class NotACharacteristicError(DegenerateCharacteristicsError):
    pass


class ConfigurationError(CCNError, ValueError):
    exit_code = 4


class SolverError(CCNError, RuntimeError):
    exit_code = 5


class DivergenceError(SolverError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class IllPosedError(SolverError):
    pass


class DefectPresentError(SolverError):
    """The field has a (near) zero, so its phase is singular."""
