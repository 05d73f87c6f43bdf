from magsteklov.shared.exceptions import SteklovError


class NotSimple(SteklovError):
    """
    Raised when a boundary, or an outer parallel curve, is not a single
    simple closed curve.
    """

    pass


class UnsupportedDomain(SteklovError):
    """
    Raised when an operation doesn't handle a domain - for example offsets
    of a nonconvex domain without the grid fallback.
    """

    pass
