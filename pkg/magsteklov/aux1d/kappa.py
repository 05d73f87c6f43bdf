from __future__ import annotations
from dataclasses import dataclass
import logging
import math
import typing as t

import numpy as np

from magsteklov.aux1d.exceptions import WeightOrderViolation
from magsteklov.aux1d.problem import AuxOptions, AuxProblem, Kappa1Result
from magsteklov.shared.exceptions import RouteMismatch
from magsteklov.shared.radial import (
    consistent_flux,
    robin_eigenpair,
    robin_root,
    steklov_value,
)
from magsteklov.torsion.weights import BlendedWeight, Weight


logger = logging.getLogger(__file__)


ROUTE_AGREEMENT = 1e-8
ROUTE_FAILURE = 1e-6
FD_STEP = 1e-3


def mu_robin_1d(problem: AuxProblem, kappa: float) -> float:
    """
    Lowest eigenvalue of ``form(f) - kappa |f(a_star)|^2`` against
    ``int |f|^2``.
    """
    return robin_eigenpair(problem.form, -kappa).value


def kappa1(
    problem: AuxProblem, route_tolerance: float = ROUTE_FAILURE
) -> Kappa1Result:
    """
    The lowest value of the auxiliary problem, by two routes.

    The denominator ``|f(a_star)|^2`` has rank one, so the value is
    ``1 / (e^T K^-1 e)`` (the Schur route). The Robin route finds the
    ``kappa`` where the lowest eigenvalue of ``form - kappa |f(a_star)|^2``
    crosses zero.

    :raises RouteMismatch:
        If the routes differ by more than ``route_tolerance``, relative.

    """
    form = problem.form
    kappa, f = steklov_value(form)

    # A constant trial function bounds kappa from above.
    guess = 1.05 * form.quadratic(np.ones(form.size))
    root, evaluations = robin_root(form, guess)
    kappa_robin = -root

    gap = abs(kappa - kappa_robin) / kappa
    if gap > route_tolerance:
        raise RouteMismatch(
            f"kappa_1: Schur route {kappa!r}, Robin route {kappa_robin!r} "
            f"(relative gap {gap:.3e})."
        )
    if gap > ROUTE_AGREEMENT:
        logger.warning(f"kappa_1 routes differ by {gap:.3e} relative.")

    X = f
    Y = consistent_flux(form, f)
    with np.errstate(divide="ignore", invalid="ignore"):
        R = np.where(X != 0.0, Y / X, 0.0)

    residual = abs(Y[-1] - kappa * X[-1])
    logger.info(
        f"kappa_1(b={problem.b!r}) = {kappa!r} (Robin {kappa_robin!r}, "
        f"{evaluations} evaluations)."
    )
    return Kappa1Result(
        kappa=kappa,
        nodes=problem.nodes,
        f=f,
        X=X,
        Y=Y,
        R=R,
        route="schur",
        kappa_robin=kappa_robin,
        route_gap=gap,
        residual=residual,
        evaluations=evaluations,
    )


def kappa_value(
    b: float, weight: Weight, options: t.Optional[AuxOptions] = None
) -> float:
    """
    Just the Schur route value - used where the full result isn't needed.
    """
    problem = AuxProblem.from_options(b, weight, options)
    return steklov_value(problem.form)[0]


###############################################################################
# Homotopy


@dataclass(frozen=True)
class HomotopyRow:
    z: float
    kappa: float
    dkappa_formula: float
    dkappa_fd: float

    @property
    def relative_gap(self) -> float:
        scale = max(abs(self.dkappa_formula), abs(self.dkappa_fd))
        if scale == 0.0:
            return 0.0
        return abs(self.dkappa_formula - self.dkappa_fd) / scale


def homotopy_derivative(
    problem: AuxProblem, first: Weight, second: Weight, f: np.ndarray
) -> float:
    """
    ``int (|Y|^2 - b^2 a^2 |X|^2) dG / (a G_z^2) da`` by the midpoint rule,
    with ``Y = a G_z f'`` the cell flux.
    """
    nodes = problem.nodes
    width = np.diff(nodes)
    middle = 0.5 * (nodes[1:] + nodes[:-1])

    weight = problem.weight(middle)
    difference = second(middle) - first(middle)
    X = 0.5 * (f[1:] + f[:-1])
    Y = middle * weight * np.diff(f) / width

    integrand = (Y**2 - problem.b**2 * middle**2 * X**2) * difference
    integrand /= middle * weight**2
    return float(np.sum(integrand * width))


def _kappa_at(
    b: float,
    first: Weight,
    second: Weight,
    z: float,
    options: AuxOptions,
    a_star: float,
) -> t.Tuple[AuxProblem, float, np.ndarray]:
    problem = AuxProblem.from_options(
        b, BlendedWeight(first, second, z), options, a_star=a_star
    )
    kappa, f = steklov_value(problem.form)
    return problem, kappa, f


def kappa_homotopy(
    b: float,
    first: Weight,
    second: Weight,
    z_grid: t.Sequence[float],
    options: t.Optional[AuxOptions] = None,
) -> t.List[HomotopyRow]:
    """
    ``kappa(z)`` for ``G_z = (1 - z) G0 + z G1`` with its derivative, from
    the integral formula and from finite differences (central inside
    ``[0, 1]``, second order one sided at the ends).

    :raises WeightOrderViolation:
        If ``G1 < G0`` anywhere on the grid. Equal weights are fine.

    """
    options = options or AuxOptions()
    a_star = first.a_star
    probe = AuxProblem.from_options(b, first, options, a_star=a_star)
    if np.any(second(probe.nodes) < first(probe.nodes)):
        raise WeightOrderViolation("G1 is below G0 somewhere on the grid.")

    def value(z: float) -> float:
        return _kappa_at(b, first, second, z, options, a_star)[1]

    rows = []
    for z in z_grid:
        z = float(z)
        problem, kappa, f = _kappa_at(b, first, second, z, options, a_star)
        formula = homotopy_derivative(problem, first, second, f)

        if z - FD_STEP < 0.0:
            fd = (
                -3.0 * kappa
                + 4.0 * value(z + FD_STEP)
                - value(z + 2 * FD_STEP)
            ) / (2.0 * FD_STEP)
        elif z + FD_STEP > 1.0:
            fd = (
                3.0 * kappa - 4.0 * value(z - FD_STEP) + value(z - 2 * FD_STEP)
            ) / (2.0 * FD_STEP)
        else:
            fd = (value(z + FD_STEP) - value(z - FD_STEP)) / (2.0 * FD_STEP)

        rows.append(
            HomotopyRow(z=z, kappa=kappa, dkappa_formula=formula, dkappa_fd=fd)
        )
        logger.debug(
            f"z={z!r}: kappa={kappa!r}, formula={formula!r}, fd={fd!r}"
        )

    return rows


###############################################################################
# Truncation


@dataclass(frozen=True)
class TruncationStudy:
    n: t.Tuple[int, ...]
    kappa: t.Tuple[float, ...]

    @property
    def monotone(self) -> bool:
        """
        Non-increasing in ``n``, allowing for rounding.
        """
        values = np.array(self.kappa)
        return bool(np.all(np.diff(values) <= 1e-12 * np.abs(values[:-1])))

    @property
    def final_gap(self) -> float:
        if len(self.kappa) < 2:
            return math.nan
        return abs(self.kappa[-1] - self.kappa[-2]) / abs(self.kappa[-1])

    def rows(self) -> t.List[t.Tuple[int, float]]:
        return list(zip(self.n, self.kappa))


def truncation_study(
    b: float,
    weight: Weight,
    n_list: t.Sequence[int],
    options: t.Optional[AuxOptions] = None,
) -> TruncationStudy:
    """
    ``kappa_1(b, min(G, 4 pi n))`` for each ``n``.
    """
    values = [
        kappa_value(b, weight.truncated(int(n)), options) for n in n_list
    ]
    study = TruncationStudy(
        n=tuple(int(i) for i in n_list), kappa=tuple(values)
    )
    if not study.monotone:
        logger.warning(
            f"The truncated values aren't non-increasing: {study.rows()}"
        )
    return study
