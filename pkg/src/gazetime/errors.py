"""Exception and warning types used across the package."""


class GazetimeError(Exception):
    """Base class for all errors raised by gazetime."""


class MissingFileError(GazetimeError):
    pass


class SchemaMismatchError(GazetimeError):
    def __init__(self, path, expected, found):
        self.path = str(path)
        self.expected = sorted(expected)
        self.found = sorted(found)
        super().__init__(
            f"{path}: column set mismatch, expected {self.expected}, found {self.found}"
        )


class RowParseError(GazetimeError):
    """A CSV row failed to parse or violated a per-field range.

    ``line`` is the 1-based line number in the file (header is line 1).
    """

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = int(line)
        super().__init__(f"{path}:{line}: {message}")


class CrossReferenceError(GazetimeError):
    pass


class EmptyDatasetError(GazetimeError):
    pass


class SingleClassError(GazetimeError):
    pass


class StratificationImpossibleError(GazetimeError):
    pass


class MissingBaselineError(GazetimeError):
    pass


class MissingQuestionnaireError(GazetimeError):
    pass


class NonPositiveDurationError(GazetimeError):
    pass


class LikertOutOfRangeError(GazetimeError):
    pass


class AllColumnsDroppedError(GazetimeError):
    pass


class KTooLargeError(GazetimeError):
    pass


class KExceedsNError(GazetimeError):
    pass


class AllCombosInvalidError(GazetimeError):
    pass


class NoEvalSlicesError(GazetimeError):
    pass


class UnknownFeatureError(GazetimeError):
    pass


class WindowLongerThanTrial(UserWarning):
    """Requested window exceeds the trial span; the slice list is empty."""
