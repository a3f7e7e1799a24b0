"""Exception hierarchy.

All errors derive from :class:`ValueError` so callers validating inputs the
sklearn way (``except ValueError``) catch them too.
"""


class EhmacError(ValueError):
    """Base class for errors raised by this package."""


class StabilityError(EhmacError):
    """The battery chain is not positive recurrent (energy rate >= attempt rate)."""


class ModeError(EhmacError):
    """Operation does not apply to the configured power mode of S2."""


class DomainError(EhmacError):
    """A quantity is outside the domain where the formula converges."""


class TruncationError(EhmacError):
    """A truncated series did not reach its tail tolerance before ``k_max``."""
