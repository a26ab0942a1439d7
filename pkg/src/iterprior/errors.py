"""Exception types shared across the package."""


class IterPriorError(Exception):
    """Base class for all package-specific errors."""


class DegeneratePosteriorError(IterPriorError):
    """Every cell of a posterior carries zero mass; nothing can be sampled."""


class DegenerateHypothesisError(IterPriorError, ValueError):
    """A hypothesis lies below the lower bound of its likelihood's support."""


class TemplateError(IterPriorError, ValueError):
    """A prompt template referenced a placeholder the observation does not provide."""


class ParseError(IterPriorError, ValueError):
    """No number of the expected shape could be read from a model response."""


class BoundsError(IterPriorError, ValueError):
    """A parsed response value falls outside the allowed range."""


class AgentFailure(IterPriorError):
    """An agent exhausted its retry budget for one iteration step."""

    def __init__(self, message: str, raw_text: str | None = None, attempts: int = 0):
        super().__init__(message)
        self.raw_text = raw_text
        self.attempts = attempts


class LlmError(IterPriorError):
    """Transport-level failure talking to a chat-completion endpoint."""

    def __init__(self, message: str, status_code: int | None = None, body: str | None = None):
        super().__init__(message)
        self.status_code = status_code
        self.body = body


class MissingCredentialError(IterPriorError):
    """The environment variable holding the API credential is unset."""


class RecordsLoadError(IterPriorError, ValueError):
    """A persisted chain-records file could not be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class EmptyEnsembleError(IterPriorError):
    """Every chain in the ensemble failed; there is nothing to analyze."""
