from magsteklov.shared.exceptions import SteklovError


class SolverFailure(SteklovError):
    """
    Raised when the torsion system can't be solved to tolerance, or the
    solution breaks the maximum principle. Both point at a bad mesh.
    """

    pass


class DegenerateLevel(SteklovError):
    """
    Raised when a level set still contains mesh edges after perturbing the
    level.
    """

    pass


class NonMonotoneMu(SteklovError):
    """
    Raised when the superlevel areas aren't strictly decreasing - the mesh
    is too coarse for the level grid.
    """

    pass


class WeightBelowBound(SteklovError):
    """
    Raised when the weight dips below 4 pi by more than the mesh tolerance.
    """

    pass
