"""Perturbation testbed and meta-evaluation harness for plain-language
summarization metrics, with a normalized-perplexity simplicity score."""

__version__ = "0.1.0"


class PlsevalError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(PlsevalError):
    """Malformed corpus files or documents."""


class LexiconError(PlsevalError):
    """Malformed lexicon files."""


class ProviderError(PlsevalError):
    """Remote provider transport or contract failures."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class ConfigError(PlsevalError):
    """Invalid run configuration."""
