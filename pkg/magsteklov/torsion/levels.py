"""
Level set statistics of a piecewise linear function: the superlevel
area ``mu(t)`` and the contour integral ``gamma(t)`` of ``1 / |grad psi|``.
Both are exact for the discrete function.
"""
from __future__ import annotations
from dataclasses import dataclass, field
import logging
import os
import typing as t

import numpy as np

from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.shared.tables import write_csv
from magsteklov.torsion.exceptions import DegenerateLevel
from magsteklov.torsion.solver import ScalarField


logger = logging.getLogger(__file__)


MIN_LEVELS = 16
PERTURBATION = 1e-12
MAX_PERTURBATIONS = 8


@dataclass(frozen=True)
class LevelTable:
    levels: np.ndarray
    mu: np.ndarray = field(metadata={"help_text": "Superlevel set areas."})
    gamma: np.ndarray = field(
        metadata={"help_text": "Contour integrals of 1 / |grad psi|."}
    )
    derivative: np.ndarray = field(
        metadata={"help_text": "-d mu / dt by centered differences."}
    )
    t_star: float = 0.0
    area: float = 0.0
    boundary_gamma: float = field(
        default=0.0,
        metadata={"help_text": "gamma extrapolated to the boundary level 0."},
    )

    @property
    def coarea_gap(self) -> np.ndarray:
        """
        Relative disagreement between ``gamma`` and ``-d mu / dt``.
        """
        return np.abs(self.gamma - self.derivative) / self.gamma

    def to_csv(self, path: t.Union[str, os.PathLike]) -> None:
        write_csv(
            path,
            ("t", "mu", "gamma"),
            zip(self.levels.tolist(), self.mu.tolist(), self.gamma.tolist()),
        )


class _Triangles:
    """
    Vertex values sorted per triangle, with the matching coordinates.
    """

    def __init__(self, psi: ScalarField):
        mesh = psi.mesh
        values = psi.values[mesh.triangles]
        order = np.argsort(values, axis=1)
        self.values = np.take_along_axis(values, order, axis=1)
        self.points = np.take_along_axis(
            mesh.nodes[mesh.triangles], order[:, :, None], axis=1
        )
        self.areas = mesh.signed_areas
        self.slopes = np.linalg.norm(psi.gradients, axis=1)
        self.nodal = psi.values


def _superlevel_area(triangles: _Triangles, level: float) -> float:
    v0, v1, v2 = triangles.values.T
    area = triangles.areas

    above = np.where(level <= v0, area, 0.0)

    lower = (v0 < level) & (level < v1)
    below = (
        area[lower]
        * (level - v0[lower]) ** 2
        / ((v1[lower] - v0[lower]) * (v2[lower] - v0[lower]))
    )
    above[lower] = area[lower] - below

    upper = (v1 <= level) & (level < v2) & (v0 < level)
    above[upper] = (
        area[upper]
        * (v2[upper] - level) ** 2
        / ((v2[upper] - v0[upper]) * (v2[upper] - v1[upper]))
    )
    return float(above.sum())


def _contour_integral(triangles: _Triangles, level: float) -> float:
    v0, v1, v2 = triangles.values.T
    crossed = (v0 < level) & (level < v2)

    p = triangles.points[crossed]
    a, b, c = v0[crossed], v1[crossed], v2[crossed]

    long_side = (level - a) / (c - a)
    start = p[:, 0] + long_side[:, None] * (p[:, 2] - p[:, 0])

    first_half = level < b
    end = np.empty_like(start)
    fraction = (level - a[first_half]) / (b[first_half] - a[first_half])
    end[first_half] = p[first_half, 0] + fraction[:, None] * (
        p[first_half, 1] - p[first_half, 0]
    )
    second = ~first_half
    fraction = (level - b[second]) / (c[second] - b[second])
    end[second] = p[second, 1] + fraction[:, None] * (
        p[second, 2] - p[second, 1]
    )

    lengths = np.linalg.norm(end - start, axis=1)
    return float(np.sum(lengths / triangles.slopes[crossed]))


def _statistics_at(
    triangles: _Triangles, level: float, t_star: float
) -> t.Tuple[float, float]:
    for attempt in range(MAX_PERTURBATIONS + 1):
        if not np.any(triangles.nodal == level):
            return (
                _superlevel_area(triangles, level),
                _contour_integral(triangles, level),
            )
        logger.warning(
            f"The level {level!r} passes through a mesh node - perturbing it."
        )
        level += PERTURBATION * t_star

    raise DegenerateLevel(f"The level {level!r} keeps hitting mesh nodes.")


def level_statistics(psi: ScalarField, n_levels: int = 200) -> LevelTable:
    """
    ``mu`` and ``gamma`` on ``n_levels`` uniform levels in
    ``[delta, t_star - delta]`` with ``delta = t_star / (4 n_levels)``.

    ``gamma`` at the boundary level is extrapolated linearly from the first
    two levels.
    """
    if n_levels < MIN_LEVELS:
        raise InvalidParameters(f"At least {MIN_LEVELS} levels are needed.")

    t_star = psi.maximum
    delta = t_star / (4.0 * n_levels)
    levels = np.linspace(delta, t_star - delta, n_levels)

    triangles = _Triangles(psi)
    mu = np.empty(n_levels)
    gamma = np.empty(n_levels)
    for j, level in enumerate(levels):
        mu[j], gamma[j] = _statistics_at(triangles, float(level), t_star)

    derivative = -np.gradient(mu, levels)
    boundary_gamma = gamma[0] - levels[0] * (gamma[1] - gamma[0]) / (
        levels[1] - levels[0]
    )

    table = LevelTable(
        levels=levels,
        mu=mu,
        gamma=gamma,
        derivative=derivative,
        t_star=t_star,
        area=psi.mesh.area,
        boundary_gamma=float(boundary_gamma),
    )

    interior = slice(1, -1)
    logger.info(
        f"Level statistics: {n_levels} levels, t_star={t_star!r}, largest "
        f"co-area gap {table.coarea_gap[interior].max():.3e}."
    )
    return table
