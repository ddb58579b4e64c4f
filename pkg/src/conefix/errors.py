"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands live in spaces of different dimensions."""


class EmptySetError(ValueError):
    """The operation needs a nonempty set."""


class EmptyIntervalError(ValueError):
    """The operation needs a nonempty order interval."""


class DomainError(ValueError):
    """A point lies outside a map's declared domain."""


class CodomainViolation(RuntimeError):
    """An evaluator produced values outside its declared codomain."""


class EvaluationError(RuntimeError):
    """An evaluator failed or returned an unusable value."""


class ImageExplosionError(EvaluationError):
    """An iterated image union grew beyond the configured size cap."""
