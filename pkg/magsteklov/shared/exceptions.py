class SteklovError(Exception):
    """
    Base class for every error raised by magsteklov. The CLI turns any of
    these into a non-zero exit code.
    """

    pass


class InvalidParameters(SteklovError):
    """
    Raised when an input is outside the range an operation accepts - for
    example a non-positive radius, or a perturbation amplitude which would
    make the boundary self-intersect.
    """

    pass


class RegimeViolation(SteklovError):
    """
    Raised when a field strength lies outside the regime where the disk
    (or exterior disk) is known to have a radial ground state, and no
    override was given.
    """

    pass


class RouteMismatch(SteklovError):
    """
    Raised when two independent computations of the same eigenvalue
    disagree by more than the route tolerance. This is a hard failure - it
    means one of the solvers is wrong.
    """

    pass


class BracketFailure(SteklovError):
    """
    Raised when a root finder can't find a sign change for the lowest
    eigenvalue as a function of the boundary parameter.
    """

    pass


class EigensolverStagnation(SteklovError):
    """
    Raised when an eigenvalue iteration doesn't reach its residual
    tolerance within the iteration budget.
    """

    pass


class TruncationInadequate(SteklovError):
    """
    Raised when a radial profile hasn't decayed enough at the truncation
    radius.
    """

    pass


class HypothesisViolation(SteklovError):
    """
    Raised when a domain doesn't satisfy the symmetry or parallel curve
    assumptions of the exterior comparison.
    """

    pass


class ChainViolation(SteklovError):
    """
    Raised when a verified inequality fails by more than its combined error
    estimate.
    """

    pass


class ConfigParseError(SteklovError):
    """
    Raised when a campaign config file can't be read, or doesn't match the
    schema.
    """

    pass
