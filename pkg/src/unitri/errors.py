"""Exception types shared across the package."""


class UnitriError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(UnitriError):
    """Operands live in incompatible ambient spaces."""


class InvalidComplexError(UnitriError):
    """A cell set violates the complex axioms (face closure, disjoint
    interiors, or injective realization)."""


class FrameworkViolationError(UnitriError):
    """An internal structural guarantee failed; indicates a rule bug or an
    element escaping its poset."""


class InapplicableRuleError(UnitriError):
    """A subdivision rule was applied to a cell outside its domain."""


class FuelExhaustedError(UnitriError):
    """Normalization exceeded its move budget; non-termination suspected."""
