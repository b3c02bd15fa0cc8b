"""Exception hierarchy shared by all subpackages."""


class HomcertError(Exception):
    """Base class for every error raised by homcert."""


class DimensionMismatch(HomcertError, ValueError):
    pass


class FieldMismatch(HomcertError, ValueError):
    pass


class NotPrime(HomcertError, ValueError):
    pass


class InvalidExponent(HomcertError, ValueError):
    pass


class ParseError(HomcertError, ValueError):
    """Malformed ring-spec or certificate document.

    ``location`` names the offending field (and line, when known).
    """

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class ValidationError(HomcertError, ValueError):
    """A parsed algebra violates one of the algebra invariants."""


class NotAssociative(ValidationError):
    pass


class NotCommutative(ValidationError):
    pass


class NotLocal(ValidationError):
    pass


class UnitError(NotAssociative):
    """The declared unit does not act as the identity."""


class IndexOutOfRange(HomcertError, IndexError):
    pass


class BudgetExceeded(HomcertError):
    pass


class ResourceBudgetExceeded(BudgetExceeded):
    pass


class NotDualizable(HomcertError):
    pass


class NotACycle(HomcertError):
    pass


class NotABoundary(HomcertError):
    pass


class ResolutionInvalid(HomcertError):
    pass


class SocleEmpty(HomcertError):
    pass


class ProjectiveResidue(HomcertError):
    """The residue field is projective, so the counterexample hypothesis fails."""


class IncompleteStages(HomcertError):
    pass
