"""Exception hierarchy.

Every domain failure is a subclass of :class:`DomainError`; the CLI reports
the class name verbatim and exits with status 1.
"""


class DomainError(Exception):
    pass


# terms
class SignatureError(DomainError):
    pass


class ParseError(DomainError):
    pass


class UnknownToken(ParseError):
    pass


class Underflow(ParseError):
    pass


class TrailingTokens(ParseError):
    pass


class TermTooLarge(DomainError):
    pass


class UnassignedVariable(DomainError):
    pass


# finite algebras
class InvalidAlgebra(DomainError):
    pass


class SignatureMismatch(DomainError):
    pass


class EmptyList(DomainError):
    pass


class EmptyCarrier(DomainError):
    pass


class NotAHomomorphism(DomainError):
    pass


class NotACongruence(DomainError):
    pass


class NotOnto(DomainError):
    pass


class NotAssociative(DomainError):
    pass


class NoIdentity(DomainError):
    pass


class NotGenerating(DomainError):
    pass


# varieties
class ProductTooLarge(DomainError):
    pass


class BoundExceeded(DomainError):
    pass


# boolean algebras
class NotInAlgebra(DomainError):
    pass


class NotInTensor(DomainError):
    pass


class UniverseTooLarge(DomainError):
    pass


class StarViolated(DomainError):
    pass


class NotSubalgebra(DomainError):
    pass


# counterexamples
class ArityTooSmall(DomainError):
    pass


class UnassignedLetter(DomainError):
    pass


class OmegaInWord(DomainError):
    pass
