"""Exception hierarchy. Each class maps to a distinct CLI exit code."""


class ZipfkitError(Exception):
    exit_code = 1


class InputError(ZipfkitError):
    """Unreadable or malformed input (bad UTF-8, bad TSV row, missing file)."""

    exit_code = 3


class EmptyInputError(InputError):
    exit_code = 4


class ConfigError(ZipfkitError):
    """Invalid configuration or an incompatible combination of inputs."""

    exit_code = 5


class NumericError(ZipfkitError):
    """A fit or comparison that cannot be computed on the given data."""

    exit_code = 6
