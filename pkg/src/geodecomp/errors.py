"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``InputError`` and ``PreconditionError``
exit with 2, ``CapacityError`` with 3, anything else with 1.
"""


class GeodecompError(Exception):
    """Base class for all library errors."""


class InputError(GeodecompError, ValueError):
    """Malformed or out-of-range input (bad JSON fields, invalid parameters)."""


class StructuralError(InputError):
    """An object is structurally unusable, e.g. a layering missing a vertex."""


class PreconditionError(GeodecompError, ValueError):
    """A construction was called on input that violates its stated precondition."""


class EmbeddingError(PreconditionError):
    """A rotation system is not a planar embedding of the given graph."""


class CapacityError(GeodecompError):
    """An exact oracle or DP table would exceed its configured size cap."""
