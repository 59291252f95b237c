"""Exception hierarchy shared by all modules."""


class OrbitilesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OrbitilesError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotSphericalError(DomainError):
    """Angles of a triangle do not sum to more than pi."""


class NoTilingError(OrbitilesError):
    """The orbit space carries no constant-curvature tiling (cases 2, 3, 9, 10)."""


class NonClosingError(OrbitilesError):
    """Reflection closure did not terminate within its tile budget."""


class NonGenericError(OrbitilesError):
    """A point or geodesic meets a degenerate locus (mirror, vertex, collinear copies)."""


class UndefinedFitError(OrbitilesError, ValueError):
    """A growth series is too short or degenerate to fit."""
