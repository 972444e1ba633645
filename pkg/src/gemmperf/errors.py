"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`GemmPerfError`
so the CLI can map it to exit code 1. :class:`InvariantError` marks internal
consistency failures (exit code 2).
"""


class GemmPerfError(Exception):
    """Base class for user/input errors."""


class InvariantError(GemmPerfError):
    """An internal invariant was violated."""


class MissingColumn(GemmPerfError):
    def __init__(self, name):
        super().__init__(f"missing required column: {name}")
        self.name = name


class UnknownColumn(GemmPerfError):
    def __init__(self, name):
        super().__init__(f"unknown column: {name}")
        self.name = name


class RowParseError(GemmPerfError):
    def __init__(self, line, column, token):
        super().__init__(f"line {line}: cannot parse column {column!r} from token {token!r}")
        self.line = line
        self.column = column
        self.token = token


class EmptyDataset(GemmPerfError):
    pass


class EmptyInput(GemmPerfError):
    pass


class AllMissing(GemmPerfError):
    pass


class IncompleteMatrix(GemmPerfError):
    pass


class TooFewRows(GemmPerfError):
    pass


class NonPositiveRuntime(GemmPerfError):
    pass


class NonPositiveIntensity(GemmPerfError):
    pass


class TileTooLarge(GemmPerfError):
    pass


class DegenerateSystem(GemmPerfError):
    pass


class ModelFeatureMismatch(GemmPerfError):
    pass


class WeightSumInvalid(GemmPerfError):
    pass


class VersionMismatch(GemmPerfError):
    pass


class CorruptModel(GemmPerfError):
    pass


class ZeroVariance(GemmPerfError):
    pass


class LengthMismatch(GemmPerfError):
    pass


class AllExcluded(GemmPerfError):
    pass


class EmptyGrid(GemmPerfError):
    pass


class InvalidConfig(GemmPerfError):
    pass
