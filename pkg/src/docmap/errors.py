"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class DocmapError(Exception):
    exit_code = 1


class ContractError(DocmapError, ValueError):
    """An operation was called with arguments outside its contract."""

    exit_code = 2


class ConfigError(DocmapError, ValueError):
    exit_code = 2


class ParseError(DocmapError, ValueError):
    exit_code = 2


class EmptyCorpusError(DocmapError):
    exit_code = 2


class EmptyGoldError(DocmapError):
    exit_code = 2


class FetchError(DocmapError, IOError):
    exit_code = 3


class NoResultsError(DocmapError):
    exit_code = 3


class NumericError(DocmapError, ArithmeticError):
    """Divergence or degenerate data in a numerical routine."""

    exit_code = 4


class StageError(DocmapError):
    """Wraps a failure inside a pipeline stage, keeping the stage name."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
        if isinstance(cause, OSError) and not isinstance(cause, DocmapError):
            self.exit_code = 3
