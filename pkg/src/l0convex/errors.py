"""Exception hierarchy shared by all modules."""


__all__ = [
    "L0ConvexError",
    "StructuralError",
    "PreconditionError",
    "SingularMapError",
    "ImproperFunctionError",
    "UnsupportedRepresentationError",
    "EvaluationError",
    "TheoremViolation",
    "CharacterizationViolation",
    "ParameterError",
    "ConfigError",
]


class L0ConvexError(Exception):
    """Base class for every error raised by the package."""


class StructuralError(L0ConvexError, ValueError):
    """Operands do not fit together: wrong atom space, shape, side or variant."""


class PreconditionError(L0ConvexError, ValueError):
    """An operation was called outside its stated domain."""


class SingularMapError(PreconditionError):
    """A per-atom matrix is (numerically) singular."""

    def __init__(self, message, atoms=()):
        super().__init__(message)
        self.atoms = tuple(atoms)


class ImproperFunctionError(PreconditionError):
    """A convex function would be identically +inf on some atom."""


class UnsupportedRepresentationError(L0ConvexError):
    """The requested transform has no exact closed form for this representation."""


class EvaluationError(L0ConvexError):
    """A linear program used during evaluation failed numerically."""


class TheoremViolation(L0ConvexError, AssertionError):
    """A checked mathematical identity did not hold on the given data."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CharacterizationViolation(TheoremViolation):
    """A black-box operator is not of the characterized (stable, affine) form."""


class ParameterError(PreconditionError):
    """Operator parameters violate a structural condition."""


class ConfigError(L0ConvexError, ValueError):
    """Invalid verification scenario or CLI configuration."""
