"""Exception types raised across the package."""


class ComplexError(ValueError):
    pass


class MissingFace(ComplexError):
    pass


class DuplicateSimplex(ComplexError):
    pass


class EmptyComplex(ComplexError):
    pass


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidWindow(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class LimitExceeded(RuntimeError):
    pass


class RegionError(ValueError):
    pass


class EmptyRegion(RegionError):
    pass


class RegionUnbounded(RegionError):
    pass


class StepUnderflow(RuntimeError):
    """Adaptive stepping could not find an admissible step.

    ``where`` holds the parameter-space location (or homotopy time) at which
    the step size fell below the configured minimum.
    """

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(message)


class StartPointNotInDiagram(ValueError):
    pass


class BasepointSingular(ValueError):
    pass


class EssentialCountMismatch(ValueError):
    pass
