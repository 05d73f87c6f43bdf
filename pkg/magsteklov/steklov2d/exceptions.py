from magsteklov.shared.exceptions import SteklovError


class MissingTorsionField(SteklovError):
    """
    Raised when the torsion gauge is requested without a torsion function
    solved on the same mesh.
    """

    pass


class InteriorSolveFailure(SteklovError):
    """
    Raised when the interior block of the magnetic stiffness can't be
    factorised, so the harmonic extension doesn't exist.
    """

    pass


class NonPositiveMargin(SteklovError):
    """
    Raised when a quantity which must be below its comparison value exceeds
    it by more than the error estimate.
    """

    pass
