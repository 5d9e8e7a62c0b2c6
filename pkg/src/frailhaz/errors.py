"""Exception hierarchy shared by all modules.

``DomainError`` covers inputs outside a model's support; ``NumericalError``
covers iterative procedures that fail to find an answer. The CLI maps the
former to exit code 2 and the latter to exit code 3.
"""


class FrailtyError(Exception):
    """Base class for every error raised by the package."""


class DomainError(FrailtyError, ValueError):
    """An input lies outside the domain of the requested quantity."""


class NumericalError(FrailtyError, ArithmeticError):
    """An iterative method failed."""


class DegenerateError(DomainError):
    """The inputs imply no frailty heterogeneity (Var(U) = 0)."""


class OutOfRangeError(DomainError):
    """A marginal hazard ratio is not attainable under the frailty model."""


class UnsupportedFamilyError(DomainError):
    pass


class NoRootError(NumericalError):
    """No sign change of the residual across the search bracket."""

    def __init__(self, message, f_lo=None, f_hi=None):
        super().__init__(message)
        self.f_lo = f_lo
        self.f_hi = f_hi


class NonConvergenceError(NumericalError):
    pass


class TooManyFailuresError(NumericalError):
    def __init__(self, message, n_failed, dominant):
        super().__init__(message)
        self.n_failed = n_failed
        self.dominant = dominant


class NoEventsError(DomainError):
    pass


class SeparationError(DomainError):
    """All events fall in a single exposure arm; the Cox MLE is infinite."""


class SingularDesignError(DomainError):
    pass


class DegenerateInstrumentError(DomainError):
    pass


class ConfigError(DomainError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
