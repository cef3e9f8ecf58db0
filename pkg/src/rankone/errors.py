"""Exception hierarchy.

Everything raised deliberately by the library derives from
:class:`RankOneError`; the CLI maps these to exit status 2.
"""


class RankOneError(Exception):
    """Base class for domain errors."""


class ZeroInput(RankOneError, ValueError):
    pass


class NotPrime(RankOneError, ValueError):
    pass


class NotUnimodular(RankOneError, ValueError):
    pass


class ParseError(RankOneError, ValueError):
    pass


class ValidationError(RankOneError, ValueError):
    pass


class UnknownAction(RankOneError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class EigenSeparationFailure(RankOneError, ArithmeticError):
    pass


class DimensionUnsupported(RankOneError, ValueError):
    pass


class NotANorm(RankOneError, ValueError):
    """The directional entropy vanishes on some nonzero direction."""


class ZeroExponent(RankOneError, ValueError):
    pass


class InfiniteHull(RankOneError):
    """Qualifying lattice points escape every bounded region."""


class NotExpansive(RankOneError, ValueError):
    pass


class DegenerateSync(RankOneError, ValueError):
    pass


class UnsupportedFamily(RankOneError, ValueError):
    pass


class InfiniteCount(RankOneError, ArithmeticError):
    """A non-ergodic element was hit where a finite count is required."""
