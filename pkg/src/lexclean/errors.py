"""Exception hierarchy. The CLI maps these to exit status 1."""


class LexcleanError(Exception):
    """Base class for all errors raised by this package."""

    module = "lexclean"


class CorpusParseError(LexcleanError):
    module = "corpus"

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


class EmptyCorpusError(LexcleanError):
    module = "corpus"


class ResourceLimitError(LexcleanError):
    module = "assoc"


class CountingError(LexcleanError):
    """A contingency cell came out negative; this is a counting bug."""

    module = "assoc"


class EstimationError(LexcleanError):
    module = "mixture"


class PipelineError(LexcleanError):
    module = "pipeline"


class NotRegradedError(LexcleanError):
    module = "pipeline"


class ConfigError(LexcleanError):
    module = "config"


class IncompleteAdjudicationError(LexcleanError):
    module = "eval"
