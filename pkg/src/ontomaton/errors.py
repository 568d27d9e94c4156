"""Exception hierarchy shared by all modules."""


class OntomatonError(Exception):
    """Base class for every error raised by this package."""


class InputError(OntomatonError, ValueError):
    """An argument is outside the domain of the operation."""


class RuleFileError(InputError):
    """A rule file is malformed. ``location`` names the offending field or line."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class InvertibilityError(OntomatonError):
    """A bijective update rule was required."""


class NormalizationError(InputError):
    pass


class ConsistencyError(OntomatonError):
    """A partition does not belong to the rule it was paired with."""


class SizeError(OntomatonError):
    """Dense linear algebra was requested on a space that is too large."""


class QuadratureError(OntomatonError, ArithmeticError):
    """Quadrature failed to converge; ``estimate`` holds the last value."""

    def __init__(self, message: str, estimate: float):
        self.estimate = estimate
        super().__init__(f"{message} (last estimate {estimate!r})")
