"""Exception taxonomy shared across the package."""


class SpeclabError(Exception):
    """Base class for all package-specific failures."""


class ZeroMatrix(SpeclabError):
    """Raised when an operation needs a nonzero matrix and got (numerically) zero."""


class NonConvergence(SpeclabError):
    """Newton-Schulz residual stayed above the acceptance threshold.

    Carries the final residual so callers can report how far off the
    iteration ended up.
    """

    def __init__(self, residual, iterations):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"polar iteration residual {self.residual:.3e} after "
            f"{self.iterations} iterations (threshold 0.3)"
        )


class DimensionError(SpeclabError):
    """Incompatible or invalid dimensions for the requested construction."""


class ShapeMismatch(SpeclabError):
    """Operand shapes do not line up."""


class InvalidScheme(SpeclabError):
    """Prior scheme parameters are out of range."""


class StepSizeTooLarge(SpeclabError):
    """The closed form requires a smaller step size than was given."""

    def __init__(self, eta, bound, what):
        self.eta = float(eta)
        self.bound = float(bound)
        super().__init__(f"eta={eta!r} violates {what} (requires eta < {bound!r})")


class NonFiniteUpdate(SpeclabError):
    """An optimizer update produced a non-finite entry (divergence)."""

    def __init__(self, step_index, rule):
        self.step_index = int(step_index)
        self.rule = rule
        super().__init__(f"non-finite update from rule {rule!r} at step {step_index}")


class ConditionsNotMet(SpeclabError):
    """Theorem hypotheses do not hold for the given profile."""


class EmptyClass(SpeclabError):
    """A class had no samples in the evaluated batch."""


class ConfigError(SpeclabError):
    """Malformed experiment configuration (CLI exit code 2)."""
