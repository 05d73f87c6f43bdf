"""
The weight ``G(a)``: the contour integral ``gamma(t)`` reparametrised by
the superlevel area ``a = mu(t)``. It is never below 4 pi, with equality
exactly for the disk.
"""
from __future__ import annotations
from dataclasses import dataclass, field, replace
from functools import cached_property
import logging
import math
import os
import typing as t

import numpy as np
from scipy.interpolate import PchipInterpolator

from magsteklov.shared.tables import write_csv
from magsteklov.torsion.exceptions import NonMonotoneMu, WeightBelowBound
from magsteklov.torsion.levels import LevelTable


logger = logging.getLogger(__file__)


FOUR_PI = 4.0 * math.pi


@dataclass
class LevelOptions:
    """
    :param n_levels:
        Number of levels between the boundary and the maximum of psi.
    :param core_fraction:
        Levels whose superlevel area is below this fraction of the domain
        area are left out of the weight grid. Their contours are too small
        to resolve.
    :param tol_mesh:
        Relative dips below 4 pi up to this size are clamped; larger ones
        are errors.

    """

    n_levels: int = 200
    core_fraction: float = 0.05
    tol_mesh: float = 0.02


class Weight:
    """
    Anything the auxiliary problem accepts as a weight.
    """

    a_star: float

    def __call__(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError()

    def truncated(self, n: int) -> "Weight":
        raise NotImplementedError()


@dataclass(frozen=True)
class ConstantWeight(Weight):
    """
    The disk weight ``G = 4 pi``, kept symbolic.
    """

    a_star: float
    value: float = FOUR_PI

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return np.full(np.shape(a), self.value)

    def truncated(self, n: int) -> ConstantWeight:
        return replace(self, value=min(self.value, FOUR_PI * n))


@dataclass(frozen=True, eq=False)
class WeightTable(Weight):
    grid: np.ndarray = field(
        metadata={
            "help_text": "Increasing superlevel areas, ending at a_star."
        }
    )
    values: np.ndarray = field(metadata={"help_text": "G on the grid."})
    a_star: float = 0.0
    endpoint: float = field(
        default=0.0, metadata={"help_text": "G at a_star (the boundary)."}
    )
    raw: t.Optional[np.ndarray] = field(default=None, repr=False)
    cap: float = math.inf

    @cached_property
    def interpolator(self) -> PchipInterpolator:
        return PchipInterpolator(self.grid, self.values, extrapolate=False)

    def __call__(self, a: np.ndarray) -> np.ndarray:
        """
        Monotone cubic interpolation in ``a``. Below the grid the innermost
        value is held.
        """
        clipped = np.clip(
            np.asarray(a, dtype=float), self.grid[0], self.grid[-1]
        )
        return np.minimum(self.interpolator(clipped), self.cap)

    def truncated(self, n: int) -> WeightTable:
        """
        ``min(G, 4 pi n)``.
        """
        return replace(self, cap=FOUR_PI * n)

    @property
    def minimum(self) -> float:
        return float(np.minimum(self.values, self.cap).min())

    @property
    def maximum(self) -> float:
        return float(np.minimum(self.values, self.cap).max())

    def to_csv(self, path: t.Union[str, os.PathLike]) -> None:
        write_csv(
            path,
            ("a", "G"),
            zip(
                self.grid.tolist(),
                np.minimum(self.values, self.cap).tolist(),
            ),
        )


@dataclass(frozen=True)
class BlendedWeight(Weight):
    """
    ``(1 - z) G0 + z G1``.
    """

    first: Weight
    second: Weight
    z: float

    @property
    def a_star(self) -> float:  # type: ignore[override]
        return self.first.a_star

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return (1.0 - self.z) * self.first(a) + self.z * self.second(a)

    def truncated(self, n: int) -> BlendedWeight:
        return replace(
            self,
            first=self.first.truncated(n),
            second=self.second.truncated(n),
        )


def weight_function(
    table: LevelTable, options: t.Optional[LevelOptions] = None
) -> WeightTable:
    """
    Reparametrise ``gamma`` by ``a = mu(t)``.

    :raises NonMonotoneMu:
        If ``mu`` isn't strictly decreasing on the level grid.
    :raises WeightBelowBound:
        If the weight dips below 4 pi by more than ``tol_mesh``.

    """
    options = options or LevelOptions()

    if not np.all(np.diff(table.mu) < 0.0):
        raise NonMonotoneMu(
            "The superlevel areas aren't strictly decreasing - refine the "
            "mesh or use fewer levels."
        )

    a_star = table.area
    resolved = table.mu >= options.core_fraction * a_star
    grid = table.mu[resolved][::-1]
    raw = table.gamma[resolved][::-1]

    if grid[-1] < a_star:
        grid = np.append(grid, a_star)
        raw = np.append(raw, table.boundary_gamma)

    lowest = float(raw.min())
    if lowest < FOUR_PI * (1.0 - options.tol_mesh):
        raise WeightBelowBound(
            f"The weight drops to {lowest!r}, more than "
            f"{options.tol_mesh:.1%} below 4 pi."
        )

    dips = raw < FOUR_PI
    if np.any(dips):
        logger.warning(
            f"Clamping {int(dips.sum())} weight values up to 4 pi (lowest "
            f"{lowest!r})."
        )
    values = np.maximum(raw, FOUR_PI)

    weight = WeightTable(
        grid=grid,
        values=values,
        a_star=a_star,
        endpoint=float(values[-1]),
        raw=raw,
    )
    logger.info(
        f"Weight on {grid.shape[0]} points: min {weight.minimum!r}, "
        f"max {weight.maximum!r}."
    )
    return weight
