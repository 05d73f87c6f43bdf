"""
Fibers of the exterior of a disk. Outside ``r = R'`` the angular mode
``n`` leaves::

    -f'' - f' / r + v_n(r) f = 0,    v_n(r) = (n / r - b r / 2)^2

with ``f`` decaying at infinity, and the Steklov condition
``-f'(R') = lambda f(R')`` - the outward normal of the exterior points
towards the origin.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging
import math
import typing as t

import numpy as np
from scipy.integrate import solve_ivp

from magsteklov.disk.fibers import BStarReport, fiber_scan
from magsteklov.shared.exceptions import (
    InvalidParameters,
    RouteMismatch,
    TruncationInadequate,
)


logger = logging.getLogger(__file__)


DECAY_ADVANCE = 40.0
ROUTE_FAILURE = 1e-6
SHOOTING_RTOL = 1e-12


def truncation_radius(b: float, R_prime: float, n: int = 0) -> float:
    """
    Where the decaying solution has dropped by about ``exp(-40)``: the
    argument ``b r^2 / 4`` advances by 40, plus room for the centrifugal
    term of mode ``n``.
    """
    return math.sqrt(
        R_prime**2 + 2.0 * abs(n) / b + 4.0 * DECAY_ADVANCE / b
    )


@dataclass(frozen=True)
class ShootingResult:
    n: int
    b: float
    R_prime: float
    R_out: float
    value: float
    evaluations: int


def shoot_exterior(
    n: int,
    b: float,
    R_prime: float = 1.0,
    R_out: t.Optional[float] = None,
) -> ShootingResult:
    """
    Integrate ``f' = g / r``, ``g' = r v_n f`` inwards from ``f(R_out) = 0``
    and read off ``lambda = -f'(R') / f(R')``. Inwards, the decaying
    solution is the growing one, so the integration is stable.

    :raises TruncationInadequate:
        If the solution hasn't grown enough for the truncation to be
        invisible, or the integrator fails.

    """
    if not b > 0 or not R_prime > 0:
        raise InvalidParameters("b and R' must be positive.")
    if R_out is None:
        R_out = truncation_radius(b, R_prime, n)
    if not R_out > R_prime:
        raise InvalidParameters("R_out must exceed R'.")

    def rhs(r: float, y: np.ndarray) -> np.ndarray:
        potential = (n / r - 0.5 * b * r) ** 2
        return np.array((y[1] / r, r * potential * y[0]))

    solution = solve_ivp(
        rhs,
        (R_out, R_prime),
        np.array((0.0, -1.0)),
        method="DOP853",
        rtol=SHOOTING_RTOL,
        atol=1e-300,
    )
    if not solution.success:
        raise TruncationInadequate(
            f"Shooting failed for mode {n} at b={b!r}: {solution.message}"
        )

    f, g = solution.y[:, -1]
    # Growth relative to the slope at R_out, which sets the neglected part.
    if not f > 0 or abs(g) < 1e12:
        raise TruncationInadequate(
            f"Mode {n} at b={b!r} hasn't decayed by R_out={R_out!r}."
        )

    return ShootingResult(
        n=n,
        b=b,
        R_prime=R_prime,
        R_out=R_out,
        value=-(g / R_prime) / f,
        evaluations=solution.nfev,
    )


def fiber_lambda_exterior(n: int, b: float, R_prime: float = 1.0) -> float:
    """
    The Steklov value of mode ``n`` on the exterior of the disk of radius
    ``R'``.
    """
    return shoot_exterior(n, b, R_prime).value


def estimate_b_circ(
    b_grid: t.Sequence[float],
    n_max: t.Optional[int] = None,
    R_prime: float = 1.0,
    resolution: t.Optional[float] = None,
) -> BStarReport:
    """
    Bracket the field strength where the radial mode stops being the
    lowest exterior fiber. This only compares fibers - whether the ground
    state is also real-valued isn't decided here, so treat the bracket as
    experimental.
    """
    if n_max is None:
        n_max = math.ceil(max(b_grid) * R_prime * R_prime) + 5

    report = fiber_scan(
        b_grid,
        lambda n, b: fiber_lambda_exterior(n, b, R_prime),
        n_max=n_max,
        tolerance=ROUTE_FAILURE,
        resolution=resolution,
    )
    logger.info(
        f"Exterior scan over {len(report.b)} field strengths: bracket "
        f"{report.bracket}, crossings {report.crossings}."
    )
    return report


def check_route(primary: float, shooting: float, label: str) -> float:
    gap = abs(primary - shooting) / abs(primary)
    if gap > ROUTE_FAILURE:
        raise RouteMismatch(
            f"{label}: closed form {primary!r}, shooting {shooting!r}."
        )
    return gap
