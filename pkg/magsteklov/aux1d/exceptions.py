from magsteklov.shared.exceptions import SteklovError


class NonPositiveForm(SteklovError):
    """
    Raised for a field strength b <= 0, where the quadratic form isn't
    positive definite.
    """

    pass


class WeightOrderViolation(SteklovError):
    """
    Raised when the second weight of a homotopy is below the first
    somewhere on the grid.
    """

    pass
