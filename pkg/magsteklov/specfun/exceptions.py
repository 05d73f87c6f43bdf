from magsteklov.shared.exceptions import SteklovError


class OverflowRange(SteklovError):
    """
    Raised when a growing Bessel function is requested at an argument where
    it would overflow a double.
    """

    pass
