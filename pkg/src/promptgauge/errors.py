"""Exception hierarchy shared across the package."""


class PromptGaugeError(Exception):
    """Base class for all package errors."""


class InputError(PromptGaugeError):
    """Caller-supplied input violates a documented precondition."""


class AssetError(PromptGaugeError):
    """A bundled or user-supplied asset is missing or malformed."""


class ContractError(PromptGaugeError):
    """Internal contract violation, e.g. misaligned feature names."""


class CorpusParseError(InputError):
    """Corpus stream is not well-formed JSON.

    Carries the byte offset where decoding failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class TrainingError(PromptGaugeError):
    """Model training could not proceed (e.g. single-class labels)."""
