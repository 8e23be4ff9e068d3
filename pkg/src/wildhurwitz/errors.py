"""Exception hierarchy shared by all modules."""


class WildHurwitzError(Exception):
    """Base class for every error raised by this package."""


class SpecMismatch(WildHurwitzError, ValueError):
    pass


class NotAUnit(WildHurwitzError, ArithmeticError):
    pass


class IncompatibleRamification(WildHurwitzError, ValueError):
    pass


class WrongCharacteristic(WildHurwitzError, ValueError):
    pass


class NotExact(WildHurwitzError, ArithmeticError):
    pass


class NotConjugate(WildHurwitzError, ArithmeticError):
    pass


class NotABasis(WildHurwitzError, ValueError):
    pass


class NoNormalForm(WildHurwitzError, ArithmeticError):
    pass


class AlternativeViolated(WildHurwitzError, AssertionError):
    pass


class NotDecomposable(WildHurwitzError, ArithmeticError):
    pass


class NotReduced(WildHurwitzError, ValueError):
    pass


class NotGood(WildHurwitzError, ValueError):
    pass


class InvalidSkeleton(WildHurwitzError, ValueError):
    pass


class Disconnected(WildHurwitzError, ValueError):
    pass


class MissingWitness(WildHurwitzError, KeyError):
    pass


class BadR0(WildHurwitzError, ValueError):
    pass


class NotAdmissible(WildHurwitzError, ValueError):
    pass


class ZeroJump(WildHurwitzError, ValueError):
    pass


class BaseNodeConflict(WildHurwitzError, ValueError):
    """Two wild nodes over one base node force incompatible thicknesses."""


class SchemaError(WildHurwitzError, ValueError):
    """Malformed input file; message names the offending field."""
