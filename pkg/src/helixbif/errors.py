"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented status codes without inspecting messages.
"""


class HelixBifError(Exception):
    exit_code = 1


class ConfigError(HelixBifError, ValueError):
    exit_code = 2


class DivergenceError(HelixBifError, RuntimeError):
    """Iteration failed to converge (Newton, quadrature, time stepping)."""

    exit_code = 3

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AccuracyError(DivergenceError):
    pass


class BlowUpError(DivergenceError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class DomainError(HelixBifError, ValueError):
    """Input outside the admissible set (R >= 1 in the disc, pole, ...)."""

    exit_code = 4


class AliasingError(DomainError):
    pass


class SymmetryError(DomainError):
    """A series left the real-coefficient class."""


class SingularityError(DomainError):
    pass


class DegenerateKernelError(DomainError):
    pass


class AdmissibilityMismatch(HelixBifError, AssertionError):
    """Closed-form admissible set disagrees with the numerical sweep."""

    exit_code = 4


class ExportError(HelixBifError, OSError):
    exit_code = 5
