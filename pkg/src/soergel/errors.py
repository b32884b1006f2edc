"""Exception hierarchy.

Two families: ``InputError`` for requests the library refuses (unsupported
orders, elements outside the enumerated ball, ...) and ``IdentityFailure``
for violated mathematical identities.  The CLI maps the first family to exit
code 2 and the second to exit code 1.
"""


class SoergelError(Exception):
    pass


class InputError(SoergelError):
    pass


class IdentityFailure(SoergelError):
    """A structural identity that must hold did not; always a bug or a bad input table."""


class UnsupportedOrder(InputError):
    pass


class FieldMismatch(InputError):
    pass


class FieldTowerUnsupported(InputError):
    pass


class BallExceeded(InputError):
    pass


class CapExceeded(InputError):
    pass


class NotSameElement(InputError):
    pass


class NotComparable(InputError):
    pass


class MalformedH(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class DivisionFailure(IdentityFailure):
    pass


class NoSolution(IdentityFailure):
    pass


class NonUniqueSolution(IdentityFailure):
    pass


class NotInSpan(IdentityFailure):
    pass


class UniquenessViolation(IdentityFailure):
    pass


class InconsistentSystem(IdentityFailure):
    pass


class CrossCheckFailed(IdentityFailure):
    pass
