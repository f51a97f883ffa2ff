"""Exception hierarchy.

Two families matter to callers: :class:`DataError` for problems with the
ratings themselves and :class:`ConfigError` for bad parameters.  The CLI
maps them to exit codes 3 and 2.
"""


class RefSVDError(Exception):
    pass


class DataError(RefSVDError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RatingDomainError(ParseError):
    pass


class DuplicateRatingError(ParseError):
    pass


class EmptyRatingsError(DataError):
    pass


class MetricError(DataError):
    pass


class ConfigError(RefSVDError, ValueError):
    pass


class RankError(ConfigError):
    pass


class ConvergenceError(RefSVDError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
