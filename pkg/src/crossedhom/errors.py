"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input (dimensions, JSON, parameters)."""


class PathError(ValueError):
    """A deformation path is invalid at some parameter value."""


class FlowError(RuntimeError):
    """The gauge flow could not be integrated (kappa unavailable)."""

    def __init__(self, message: str, s: float):
        super().__init__(message)
        self.s = s
