"""Exception and warning classes raised across the package."""


class ShapeStressError(ValueError):
    """Base class for all errors raised by shapestress."""


class DimensionMismatch(ShapeStressError):
    pass


class DegenerateConfiguration(ShapeStressError):
    """All landmarks coincide, so the configuration has zero centroid size."""


class CollinearLandmarks(ShapeStressError):
    """The thin-plate spline system is singular (landmarks on a line)."""


class DuplicateLandmarks(ShapeStressError):
    pass


class InsufficientLandmarks(ShapeStressError):
    pass


class EmptySample(ShapeStressError):
    pass


class GridMismatch(ShapeStressError):
    pass


class TooFewSurvivors(ShapeStressError):
    """Depth trimming left fewer configurations than GPA needs."""


class SampleTooSmall(ShapeStressError):
    pass


class TooFewDates(ShapeStressError):
    pass


class IncompletePanel(ShapeStressError):
    pass


class SchemaError(ShapeStressError):
    pass


class ParseError(ShapeStressError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class DuplicateRecord(ShapeStressError):
    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


class EmptyIntersection(ShapeStressError):
    pass


class ManifestError(ShapeStressError):
    pass


class NoConvergence(RuntimeWarning):
    """GPA hit ``max_iter``; the best iterate is still returned."""
