"""
Error hierarchy for planarcalc.

Precondition failures subclass ``ValueError`` as well, so callers that only
care about bad input can keep catching the builtin.
"""

from __future__ import annotations


class PlanarCalcError(Exception):
    """Root of every error raised by planarcalc."""


class DocumentError(PlanarCalcError):
    """A JSON document is malformed or does not follow the expected schema."""


class PreconditionError(PlanarCalcError, ValueError):
    """An operation was called outside its domain."""


class InvalidWordError(PreconditionError):
    """A word has a letter outside the alphabet or exceeds the truncation degree."""


class AlphabetMismatchError(PreconditionError):
    pass


class ScalarKindError(PreconditionError):
    """Rational and float64 scalars were mixed."""


class ConstantTermError(PreconditionError):
    """A series or field has the wrong constant term for the operation."""


class SingularLinearPartError(PreconditionError):
    """The linear part of a field is not invertible."""


class NotCenteredError(PreconditionError):
    pass


class NotRegularError(PreconditionError):
    """The conjugate field is not regular (not centered or singular covariance)."""


class InconsistentPairError(PreconditionError):
    """An effective action was not built from the cumulant series it is paired with."""


class ResourceLimitError(PreconditionError):
    pass


class ConfigError(PreconditionError):
    pass
