from magsteklov.shared.exceptions import SteklovError


class GridTooCoarse(SteklovError):
    """
    Raised when a threshold crossing is bracketed by field strengths
    further apart than the requested resolution.
    """

    pass
