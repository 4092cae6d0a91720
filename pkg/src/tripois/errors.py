"""Exception types shared across the package.

The CLI maps these onto process exit codes: FormatError -> 2,
NonConvergenceError -> 3, I/O failures -> 4.
"""


class FormatError(ValueError):
    """Malformed serialized input (JSON/CSV). `field` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NonConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of panel budget.

    Carries the best estimate and the tolerance actually achieved so callers
    can decide whether the partial answer is usable.
    """

    def __init__(self, best: float, achieved: float, requested: float):
        self.best = best
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            f"quadrature did not converge: achieved {achieved:.3e}, "
            f"requested {requested:.3e}, best estimate {best!r}"
        )


class SamplingError(RuntimeError):
    """Rejection sampler starved (degenerate region)."""
