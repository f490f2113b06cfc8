"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line can map failures
onto its contract: 1 for validation or mathematical failures, 2 for parse
errors and 3 for broken internal invariants.
"""


class GhomError(Exception):
    exit_code = 1


class ValidationError(GhomError):
    pass


class ParseError(GhomError):
    exit_code = 2

    def __init__(self, message, line=None, column=None, path=None):
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)


class InternalInvariantError(GhomError):
    """A computed object violates an identity that holds by theorem."""

    exit_code = 3


# group_core
class GroupError(ValidationError):
    pass


class NonAssociative(GroupError):
    pass


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    pass


class NotAPermutation(GroupError):
    pass


class ClosureExceedsLimit(GroupError):
    pass


class NotASubgroupPair(GroupError):
    pass


class NotComposable(GroupError):
    pass


class NotASubgroup(GroupError):
    pass


# abelian
class CompositionNotZero(ValidationError):
    pass


class IllDefinedMorphism(ValidationError):
    pass


class NotContained(ValidationError):
    pass


class NotAChainMap(ValidationError):
    pass


class NotPrime(ValidationError):
    pass


# coeff
class MissingValue(ValidationError):
    pass


class IllDefinedMatrix(ValidationError):
    pass


class FunctorialityViolation(ValidationError):
    pass


class NotEquivariant(ValidationError):
    pass


# gcomplex
class NotRegular(ValidationError):
    pass


class InvalidHComplex(ValidationError):
    pass


class InvalidComplex(ValidationError):
    pass


# bredon
class SystemMissingStabilizer(ValidationError):
    pass


class BoundarySquaredNonzero(InternalInvariantError):
    pass


class BasepointNotVertex(ValidationError):
    pass


class BasepointNotFixed(ValidationError):
    pass


class NotExcisable(ValidationError):
    pass


class ExactnessFailure(InternalInvariantError):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(message)


# spectral
class IllDefinedDerivedMap(InternalInvariantError):
    pass
