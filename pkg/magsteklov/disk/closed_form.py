from __future__ import annotations
from dataclasses import dataclass, field
import logging
import os
import typing as t

import numpy as np

from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.shared.guards import RegimeGuard, apply_regime_guard
from magsteklov.shared.tables import write_csv
from magsteklov.specfun.bessel import bessel_i, ratio_i1_i0


logger = logging.getLogger(__file__)


DISK_REGIME = RegimeGuard(
    regime_number=lambda b, R, **kwargs: b * R * R,
    limit=1.0,
    description="b * R^2",
)


@dataclass(frozen=True)
class DiskResult:
    value: float
    mode: int = 0
    nodes: t.Optional[np.ndarray] = field(default=None, repr=False)
    profile: t.Optional[np.ndarray] = field(
        default=None,
        repr=False,
        metadata={"help_text": "Radial profile with f(R) = 1."},
    )
    route: str = "closed-form"


def _check(b: float, R: float):
    if not b > 0:
        raise InvalidParameters("The field strength must be positive.")
    if not R > 0:
        raise InvalidParameters("The radius must be positive.")


@apply_regime_guard(DISK_REGIME)
def lambda_disk(b: float, R: float = 1.0, override: bool = False) -> float:
    """
    The lowest magnetic Steklov eigenvalue of the disk of radius ``R``::

        (b R / 2) I1(b R^2 / 4) / I0(b R^2 / 4)

    It belongs to the radial ground state ``I0(b r^2 / 4)``, which is only
    known to be the ground state while ``b R^2 <= 1``. Larger values need
    ``override``.
    """
    _check(b, R)
    return 0.5 * b * R * ratio_i1_i0(0.25 * b * R * R)


@apply_regime_guard(DISK_REGIME)
def disk_ground_state(
    b: float, R: float = 1.0, n_points: int = 201, override: bool = False
) -> DiskResult:
    """
    ``lambda_disk`` together with the radial profile ``I0(b r^2 / 4)``,
    normalised to 1 at ``r = R``.
    """
    _check(b, R)
    nodes = np.linspace(0.0, R, n_points)
    arguments = np.maximum(0.25 * b * nodes**2, np.finfo(float).tiny)
    profile = np.asarray(bessel_i(0, arguments))
    profile = profile / bessel_i(0, 0.25 * b * R * R)
    return DiskResult(
        value=lambda_disk(b, R, override=True),
        nodes=nodes,
        profile=profile,
    )


@dataclass(frozen=True)
class DiskCurve:
    b: np.ndarray
    values: np.ndarray

    @property
    def increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) > 0.0))


def lambda_disk_curve(
    b_grid: t.Sequence[float],
    R: float = 1.0,
    path: t.Optional[t.Union[str, os.PathLike]] = None,
    override: bool = False,
) -> DiskCurve:
    """
    ``lambda_disk`` along a grid of field strengths, optionally written as a
    ``b, lambda_disk`` CSV.
    """
    b_values = np.asarray(b_grid, dtype=float)
    values = np.array(
        [lambda_disk(float(b), R, override=override) for b in b_values]
    )
    curve = DiskCurve(b=b_values, values=values)
    if not curve.increasing:
        logger.warning("lambda_disk isn't increasing along the b grid.")

    if path is not None:
        write_csv(
            path, ("b", "lambda_disk"), zip(b_values.tolist(), values.tolist())
        )
    return curve
