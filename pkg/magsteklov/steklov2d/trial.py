from __future__ import annotations
from dataclasses import dataclass
import logging

import numpy as np

from magsteklov.aux1d.problem import Kappa1Result
from magsteklov.meshing.mesh import boundary_trace
from magsteklov.steklov2d.forms import FormSet
from magsteklov.torsion.levels import LevelTable
from magsteklov.torsion.solver import ScalarField


logger = logging.getLogger(__file__)


@dataclass(frozen=True)
class TorsionTrial:
    quotient: float
    kappa: float
    perimeter: float

    @property
    def scaled(self) -> float:
        """
        ``|boundary| * quotient``, comparable with ``kappa``.
        """
        return self.perimeter * self.quotient


def superlevel_area(psi: ScalarField, levels: LevelTable) -> np.ndarray:
    """
    ``mu(psi(x))`` at every node, interpolated from the level table with
    the exact ends ``mu(0) = |domain|`` and ``mu(t_star) = 0``.
    """
    t_grid = np.concatenate(([0.0], levels.levels, [levels.t_star]))
    mu_grid = np.concatenate(([levels.area], levels.mu, [0.0]))
    return np.interp(psi.values, t_grid, mu_grid)


def torsion_trial_quotient(
    fs: FormSet,
    psi: ScalarField,
    levels: LevelTable,
    kappa_result: Kappa1Result,
) -> TorsionTrial:
    """
    The Steklov quotient of ``u(x) = f(mu(psi(x)))``, where ``f`` is the
    minimiser of the auxiliary problem. It bounds the discrete eigenvalue
    from above, and approximates ``kappa / |boundary|``.
    """
    a = superlevel_area(psi, levels)
    u = np.interp(a, kappa_result.nodes, kappa_result.f)

    numerator = float(np.vdot(u, fs.K @ u).real)
    denominator = float(u @ (fs.M_boundary @ u))
    trial = TorsionTrial(
        quotient=numerator / denominator,
        kappa=kappa_result.kappa,
        perimeter=boundary_trace(fs.mesh).perimeter,
    )
    logger.info(
        f"Torsion trial quotient {trial.quotient!r}: |boundary| * quotient "
        f"= {trial.scaled!r}, kappa = {trial.kappa!r}."
    )
    return trial
