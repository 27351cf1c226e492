"""Exception hierarchy shared by all lexkit modules."""


class LexkitError(Exception):
    """Base class for all lexkit errors."""


class ParseError(LexkitError):
    """A record could not be parsed; message names the file and line."""

    def __init__(self, message: str, path=None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}"
            if line is not None:
                loc += f":{line}"
            loc = f" [{loc}]"
        super().__init__(f"{message}{loc}")
        self.path = path
        self.line = line


class IntegrityError(LexkitError):
    """Data violates a structural invariant (duplicate ids, dangling references)."""


class EmptyInputError(LexkitError):
    """An operation received an empty collection it cannot work on."""


class NotFoundError(LexkitError):
    """A referenced id is not present in the indexed collection."""


class ValidationError(LexkitError):
    """A value fails schema validation (non-finite score, bad span, bad enum)."""


class CompletenessError(LexkitError):
    """A score matrix is missing a required (checkpoint, query, doc) combination."""


class ConfigError(LexkitError):
    """A configuration value is inconsistent with the data it is applied to."""


class UndefinedSimilarityError(LexkitError):
    """Similarity is undefined for the given inputs (e.g. two empty texts)."""


class TrainingError(LexkitError):
    """Model training cannot proceed (e.g. single-class data)."""
