"""Exception hierarchy.  Every failure carries enough context to act on."""


class AlgebraError(Exception):
    """Base class for all errors raised by this package."""


# rings
class NotPrime(AlgebraError, ValueError):
    pass


class NotLocal(AlgebraError, ValueError):
    pass


class MixedRings(AlgebraError, TypeError):
    pass


class NonUnit(AlgebraError, ArithmeticError):
    pass


class NonUnitDerivative(AlgebraError, ArithmeticError):
    pass


class NoConvergence(AlgebraError, ArithmeticError):
    pass


class ResidueMismatch(AlgebraError, ValueError):
    pass


class IncompleteSearch(AlgebraError):
    pass


class RingSyntaxError(AlgebraError, ValueError):
    pass


# matrices
class NonUnitParameter(AlgebraError, ValueError):
    pass


class BadIndices(AlgebraError, IndexError):
    pass


class NotInvertible(AlgebraError, ArithmeticError):
    pass


class NotUnimodular(AlgebraError, ValueError):
    pass


class NotInCongruenceSubgroup(AlgebraError, ValueError):
    pass


class UnsupportedCase(AlgebraError):
    pass


class PreconditionViolated(AlgebraError, ValueError):
    pass


# groups
class CapExceeded(AlgebraError):
    pass


class UnsupportedPresentation(AlgebraError, ValueError):
    pass


class NonInvertibleImage(AlgebraError, ArithmeticError):
    pass


class TableMissing(AlgebraError):
    pass


class PresentationSyntaxError(AlgebraError, ValueError):
    pass


# deformations
class SearchTooLarge(AlgebraError):
    pass


class KernelTooLarge(AlgebraError):
    pass


class NotAHomomorphism(AlgebraError):
    def __init__(self, axiom: str, witness=None):
        super().__init__(f"{axiom}: {witness!r}")
        self.axiom = axiom
        self.witness = witness


class OrderNotCoprime(AlgebraError, ArithmeticError):
    pass


class NonScalarRatio(AlgebraError):
    pass


class NotCongruentToInduced(AlgebraError):
    pass


class ClaimViolated(AlgebraError):
    def __init__(self, claim: int, witness=None):
        super().__init__(f"claim {claim} violated: {witness!r}")
        self.claim = claim
        self.witness = witness
