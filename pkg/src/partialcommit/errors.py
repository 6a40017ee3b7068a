"""Exception types shared across the package.

Everything raised on bad user input derives from :class:`GameError`, which
the CLI maps to exit code 1.  Internal invariant violations use plain
``RuntimeError`` and are bugs, not user errors.
"""


class GameError(Exception):
    """Base class for domain errors."""


class DimensionMismatch(GameError):
    """Payoff matrices or profiles have incompatible shapes."""


class EmptyGame(GameError):
    """A game needs at least one row and one column."""


class PartitionInvalid(GameError):
    """Row partition does not cover the row set exactly once."""


class UniverseMismatch(GameError):
    """Two partitions do not share the same row universe."""


class ScaleGuardExceeded(GameError):
    """An exponential-time solver was invoked above the size guard."""


class UnboundedPolytope(GameError):
    """Vertex enumeration was asked for a polytope with a recession direction."""


class UnknownExample(GameError):
    """Unrecognized built-in example name."""


class InvalidInstance(GameError):
    """Malformed exact-cover instance."""


class InvalidParams(GameError):
    """Game family parameters outside their legal range."""
