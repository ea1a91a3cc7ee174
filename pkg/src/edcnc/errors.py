"""Exception types shared across the package."""


class EdcncError(Exception):
    """Base class for all package-specific errors."""


class LengthError(EdcncError, ValueError):
    """A bit stream or payload has an incompatible length."""


class ArityError(EdcncError, ValueError):
    """A shift tuple or matrix does not match the raw-stream count."""


class DomainError(EdcncError, ValueError):
    """An argument is outside the supported parameter range."""


class SearchExhausted(EdcncError):
    """No shift matrix satisfies the subset checks within the shift bound."""


class Unsolvable(EdcncError):
    """The received items do not determine the generation uniquely."""


class Inconsistent(EdcncError):
    """The received items admit no solution (undetected corruption)."""


class BadMagic(EdcncError):
    """Frame bytes do not start with the expected magic or version."""


class Truncated(EdcncError):
    """Frame bytes are shorter (or longer) than the declared layout."""


class Unauthorized(EdcncError):
    """Key request from a node that is not a group member."""


class UnknownGroup(EdcncError):
    """Key request for a group id that was never created."""


class Unrecoverable(EdcncError):
    """A destination cannot reach a decodable item set.

    Carries ``decryptions`` so callers can report the work spent before
    giving up.
    """

    def __init__(self, message: str, decryptions: int = 0):
        super().__init__(message)
        self.decryptions = decryptions


class ConfigError(EdcncError, ValueError):
    """A scenario or CLI configuration is invalid."""


class TooLarge(EdcncError):
    """Enumeration guard exceeded (candidate space too big to brute force)."""
