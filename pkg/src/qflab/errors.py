"""Exception hierarchy shared across the package."""


class QflabError(Exception):
    """Base class for all package-specific failures."""


class ConfigurationError(QflabError):
    """Invalid spec, config file, or guard violation. CLI maps this to exit code 2."""


class ProtocolError(QflabError):
    """Malformed federated-round message (e.g. gradient length mismatch)."""


class DivergenceError(QflabError):
    """Training or attack produced a non-finite loss."""


class AliasingError(QflabError):
    """Fourier extraction residual too large: the stated maximum frequency is understated."""
