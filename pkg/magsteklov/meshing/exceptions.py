from magsteklov.shared.exceptions import SteklovError


class DegenerateMesh(SteklovError):
    """
    Raised when no triangulation meeting the minimum angle bound was found,
    or when the boundary is sampled too coarsely.
    """

    pass


class DisconnectedBoundary(SteklovError):
    """
    Raised when the boundary edges of a mesh don't form a single closed
    cycle. This always points at a meshing bug.
    """

    pass
