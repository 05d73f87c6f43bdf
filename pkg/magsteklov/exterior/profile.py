"""
The exterior of a disk of radius ``R'``. Its radial ground state is the
decaying branch ``K0(b r^2 / 4)`` of the same radial equation as the
interior, which gives::

    lambda = (b R' / 2) K1(b R'^2 / 4) / K0(b R'^2 / 4)

The closed form is always checked against shooting.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from functools import cached_property
import logging
import math
import typing as t

import numpy as np

from magsteklov.exterior.fibers import check_route, shoot_exterior
from magsteklov.exterior.fibers import truncation_radius
from magsteklov.shared.exceptions import (
    InvalidParameters,
    TruncationInadequate,
)
from magsteklov.shared.guards import RegimeGuard, apply_regime_guard
from magsteklov.specfun.bessel import bessel_k, ratio_k1_k0


logger = logging.getLogger(__file__)


EXTERIOR_REGIME = RegimeGuard(
    regime_number=lambda b, R_prime, **kwargs: b * R_prime * R_prime,
    limit=1.0,
    description="b * R'^2",
)

DECAY_RATIO = 1e-14
TRUNCATION_SHIFT = 1e-10
PANELS = 512
PANEL_ORDER = 8


@dataclass(frozen=True)
class ExteriorDiskResult:
    b: float
    R_prime: float
    value: float = field(metadata={"help_text": "K-ratio value."})
    value_shooting: float = math.nan
    value_doubled: float = field(
        default=math.nan,
        metadata={"help_text": "Shooting value with R_out doubled."},
    )
    route_gap: float = math.nan
    truncation_shift: float = math.nan


def _check(b: float, R_prime: float):
    if not b > 0:
        raise InvalidParameters("The field strength must be positive.")
    if not R_prime > 0:
        raise InvalidParameters("The radius must be positive.")


@apply_regime_guard(EXTERIOR_REGIME)
def exterior_disk(
    b: float, R_prime: float = 1.0, override: bool = False
) -> ExteriorDiskResult:
    """
    The exterior disk value by the K-ratio, cross-checked by shooting at
    the default truncation radius and at twice that radius.

    :raises RouteMismatch:
        If the K-ratio and shooting differ by more than 1e-6.
    :raises TruncationInadequate:
        If doubling the truncation radius moves the value by more than
        1e-10.

    """
    _check(b, R_prime)
    value = 0.5 * b * R_prime * ratio_k1_k0(0.25 * b * R_prime * R_prime)

    R_out = truncation_radius(b, R_prime)
    shooting = shoot_exterior(0, b, R_prime, R_out).value
    doubled = shoot_exterior(0, b, R_prime, 2.0 * R_out).value
    gap = check_route(value, shooting, f"Exterior disk at b={b!r}")

    shift = abs(shooting - doubled) / abs(value)
    if shift > TRUNCATION_SHIFT:
        raise TruncationInadequate(
            f"Doubling R_out moves the exterior value by {shift:.3g}."
        )

    logger.debug(
        f"Exterior disk b={b!r}, R'={R_prime!r}: {value!r} (gap {gap:.3g})"
    )
    return ExteriorDiskResult(
        b=b,
        R_prime=R_prime,
        value=value,
        value_shooting=shooting,
        value_doubled=doubled,
        route_gap=gap,
        truncation_shift=shift,
    )


@apply_regime_guard(EXTERIOR_REGIME)
def lambda_disk_exterior(
    b: float, R_prime: float = 1.0, override: bool = False
) -> float:
    """
    The lowest magnetic Steklov eigenvalue of the exterior of the disk of
    radius ``R'``, for ``b R'^2 <= 1`` unless overridden. It's positive for
    every ``b > 0``.
    """
    return exterior_disk(b, R_prime, override=True).value


###############################################################################


def panel_rule(
    length: float, n_panels: int = PANELS, order: int = PANEL_ORDER
) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes and weights on ``n_panels`` equal panels of
    ``[0, length]``.
    """
    reference, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, length, n_panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    nodes = edges[:-1, None] + half * (reference[None, :] + 1.0)
    return nodes.ravel(), (half * weights[None, :]).ravel()


@dataclass(frozen=True)
class RadialProfile:
    """
    ``psi(t) = K0(b (R' + t)^2 / 4)``, as a function of the distance ``t``
    to the disk, normalised so that its trace has unit norm on the circle:
    ``2 pi R' psi(0)^2 = 1``.
    """

    b: float
    R_prime: float
    R_out: float
    value: float = field(
        metadata={"help_text": "lambda of the exterior disk."}
    )
    t: np.ndarray = field(repr=False, default=None)
    values: np.ndarray = field(repr=False, default=None)
    derivatives: np.ndarray = field(repr=False, default=None)

    @property
    def extent(self) -> float:
        return self.R_out - self.R_prime

    @property
    def trace(self) -> float:
        return 1.0 / math.sqrt(2.0 * math.pi * self.R_prime)

    def _argument(self, t_value: np.ndarray) -> np.ndarray:
        return 0.25 * self.b * (self.R_prime + t_value) ** 2

    def _decay(self, t_value: np.ndarray) -> np.ndarray:
        # exp(-x) / K0(x0), through the scaled K0 so nothing underflows.
        x0 = self._argument(0.0)
        x = self._argument(t_value)
        return np.exp(x0 - x) / bessel_k(0, x0, scaled=True)

    def psi(self, t_value: np.ndarray) -> np.ndarray:
        x = self._argument(t_value)
        return self.trace * bessel_k(0, x, scaled=True) * self._decay(t_value)

    def dpsi(self, t_value: np.ndarray) -> np.ndarray:
        x = self._argument(t_value)
        return (
            -0.5
            * self.b
            * (self.R_prime + t_value)
            * self.trace
            * bessel_k(1, x, scaled=True)
            * self._decay(t_value)
        )

    def tail(self, t_value: float) -> float:
        """
        ``int_t^inf (psi'^2 + b^2 r^2 / 4 psi^2) 2 pi r dt`` for
        ``r = R' + t``, which the radial equation turns into
        ``-2 pi r psi(t) psi'(t)``.
        """
        r = self.R_prime + t_value
        return float(
            -2.0 * math.pi * r * self.psi(t_value) * self.dpsi(t_value)
        )

    @cached_property
    def quadrature(self) -> t.Tuple[np.ndarray, np.ndarray]:
        return panel_rule(self.extent)

    def rayleigh_quotient(self) -> float:
        """
        The Steklov quotient of the profile on the exterior disk, where the
        parallel circles have length ``2 pi r`` and second moment
        ``2 pi r^3``. It reproduces ``value``.
        """
        nodes, weights = self.quadrature
        r = self.R_prime + nodes
        psi = self.psi(nodes)
        dpsi = self.dpsi(nodes)
        numerator = np.sum(
            weights
            * 2.0
            * math.pi
            * r
            * (dpsi**2 + 0.25 * self.b**2 * r**2 * psi**2)
        )
        numerator += self.tail(self.extent)
        return float(
            numerator / (2.0 * math.pi * self.R_prime * self.trace**2)
        )

    def l2_mass(self, extent: t.Optional[float] = None) -> float:
        """
        ``int psi^2 2 pi (R' + t) dt`` over ``[0, extent]``.
        """
        nodes, weights = panel_rule(extent or self.extent)
        return float(
            np.sum(
                weights
                * 2.0
                * math.pi
                * (self.R_prime + nodes)
                * self.psi(nodes) ** 2
            )
        )


@apply_regime_guard(EXTERIOR_REGIME)
def radial_profile_exterior(
    b: float,
    R_prime: float = 1.0,
    n_points: int = 2001,
    override: bool = False,
) -> RadialProfile:
    """
    The exterior disk ground state tabulated on ``[0, R_out - R']``.

    :raises TruncationInadequate:
        If the profile isn't decreasing, or hasn't decayed by a factor
        1e-14 at the truncation radius.

    """
    result = exterior_disk(b, R_prime, override=True)
    R_out = truncation_radius(b, R_prime)
    profile = RadialProfile(
        b=b, R_prime=R_prime, R_out=R_out, value=result.value
    )

    grid = np.linspace(0.0, profile.extent, n_points)
    values = np.asarray(profile.psi(grid))
    derivatives = np.asarray(profile.dpsi(grid))

    if not np.all(np.diff(values) < 0.0):
        raise TruncationInadequate("The exterior profile isn't decreasing.")
    if not values[-1] < DECAY_RATIO * values[0]:
        raise TruncationInadequate(
            f"The exterior profile only decays to {values[-1] / values[0]:.3g}"
            " of its trace."
        )

    return RadialProfile(
        b=b,
        R_prime=R_prime,
        R_out=R_out,
        value=result.value,
        t=grid,
        values=values,
        derivatives=derivatives,
    )
