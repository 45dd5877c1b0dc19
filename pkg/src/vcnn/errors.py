"""Exception types shared across the package."""


class VcnnError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(VcnnError, ValueError):
    """Malformed argument: wrong dimension, non-finite coordinate, bad label, ..."""


class UnsupportedParametersError(VcnnError, ValueError):
    """Parameters outside the supported (d, m) grid or an operation's stated range."""


class InvalidWitnessError(VcnnError, ValueError):
    """A witness precondition failed, e.g. the interior point is not strictly interior."""


class ConstructionInfeasibleError(VcnnError, RuntimeError):
    """A witness construction could not realise a labelling.

    The constructions are proven to cover every labelling of their
    arrangements, so this surfacing is an internal bug signal, not a
    legitimate runtime outcome.
    """


class NumericalError(VcnnError, ArithmeticError):
    """A solver failed to converge or a residual check failed."""


class CertificateError(VcnnError, ValueError):
    """A certificate file is malformed, incomplete, or of an unknown schema."""
