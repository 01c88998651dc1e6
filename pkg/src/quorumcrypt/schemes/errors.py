class ThresholdError(Exception):
    """Base class for scheme-level failures."""


class UnsupportedSchemeError(ThresholdError):
    pass


class MalformedError(ThresholdError, ValueError):
    """An encoding could not be parsed; distinct from a verification returning False."""


class InvalidCiphertextError(ThresholdError):
    """A ciphertext failed its validity check; no decryption share may be released."""


class InsufficientSharesError(ThresholdError):
    pass


class DuplicateIndexError(ThresholdError, ValueError):
    pass


class IntegrityError(ThresholdError):
    """Authenticated decryption or result verification failed after combining."""


class NonceReuseError(ThresholdError):
    pass


class SigningSetError(ThresholdError, ValueError):
    pass


class InvalidShareError(ThresholdError):
    pass
