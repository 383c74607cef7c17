"""Exception types shared across the package."""


class HierCacheError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(HierCacheError, ValueError):
    """A parameter lies outside its admissible range."""


class ConstraintError(HierCacheError, ValueError):
    """Parameters are individually valid but jointly inconsistent."""


class DemandError(HierCacheError, ValueError):
    """A demand vector is malformed or misses a required file."""


class DivisibilityError(HierCacheError, ValueError):
    """A concrete file size does not split into whole-byte chunks."""


class ReconstructError(HierCacheError, RuntimeError):
    """A mirror cannot derive a symbol it must relay."""


class DecodeError(HierCacheError, RuntimeError):
    """A user cannot recover a chunk of its demanded file."""


class HullError(HierCacheError, ValueError):
    """A target point lies outside the convex region being interpolated."""


class DegenerateError(HierCacheError, ValueError):
    """An interpolation problem has collapsed to a single point."""


class ScopeError(HierCacheError, ValueError):
    """An operation was invoked outside the regime where it is defined."""


class SingularError(HierCacheError, ZeroDivisionError):
    """A rate expression was evaluated at a singular memory point."""
