import os

DEFAULT_TOLERANCE = 1e-9
ENV_VAR = "ORBIFOLD_TOLERANCE"


def predicate_tolerance(tol=None):
    """Resolve the absolute tolerance used by geometric predicates.

    An explicit ``tol`` wins, then the ``ORBIFOLD_TOLERANCE`` environment
    variable, then the 1e-9 default.
    """
    if tol is not None:
        return float(tol)
    raw = os.environ.get(ENV_VAR)
    if raw:
        return float(raw)
    return DEFAULT_TOLERANCE
