"""Exception hierarchy shared by the loaders, the recommenders and the harness."""


class JobRecError(Exception):
    """Base class for all package errors."""


class DataError(JobRecError, ValueError):
    """Malformed or inconsistent input data."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(JobRecError, ValueError):
    """Invalid experiment, training or generator configuration."""


class StageError(JobRecError, RuntimeError):
    """An error raised inside a named pipeline stage."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause
