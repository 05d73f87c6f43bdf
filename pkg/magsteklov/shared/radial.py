"""
Linear finite elements for one dimensional Steklov and Robin problems of
Sturm-Liouville type::

    form(f) = int p |f'|^2 + q |f|^2 dx,    mass(f) = int m |f|^2 dx

with a boundary term acting on one endpoint. The disk fibers, the
auxiliary problem and the exterior cross-checks are all of this shape.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging
import math
import typing as t

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from magsteklov.shared.eigen import Eigenpair
from magsteklov.shared.exceptions import BracketFailure, InvalidParameters


logger = logging.getLogger(__file__)


GAUSS_ORDER = 4


def graded_grid(
    length: float,
    n_nodes: int,
    ratio: t.Optional[float] = 1.05,
    first_fraction: float = 1e-4,
) -> np.ndarray:
    """
    Nodes on ``[0, length]``. Cells grow geometrically by ``ratio`` away
    from 0, until they reach the size of the uniform cells which fill the
    rest of the interval.

    :param first_fraction:
        Size of the smallest cell, relative to the uniform cells.

    """
    if n_nodes < 3:
        raise InvalidParameters("A radial grid needs at least 3 nodes.")

    n_cells = n_nodes - 1
    if not ratio or ratio <= 1.0:
        return np.linspace(0.0, length, n_nodes)

    graded = math.ceil(math.log(1.0 / first_fraction) / math.log(ratio))
    graded = min(graded, n_cells // 3)

    sizes = np.ones(n_cells)
    sizes[:graded] = ratio ** (np.arange(graded) - graded)
    nodes = np.concatenate(([0.0], np.cumsum(sizes)))
    nodes *= length / nodes[-1]
    nodes[-1] = length
    return nodes


def gauss_points(nodes: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre points and weights on every cell, each shaped
    ``(n_cells, GAUSS_ORDER)``.
    """
    reference, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    left = nodes[:-1, None]
    width = np.diff(nodes)[:, None]
    points = left + 0.5 * width * (reference[None, :] + 1.0)
    return points, 0.5 * width * weights[None, :]


@dataclass(frozen=True)
class RadialForm:
    """
    A symmetric tridiagonal quadratic form on a 1D grid.

    ``diag`` and ``off`` only cover the free nodes - Dirichlet endpoints
    are already removed. ``potential`` holds, per cell, the integrals of
    ``q`` against the two hat functions, which give the consistent flux.
    """

    nodes: np.ndarray
    diag: np.ndarray
    off: np.ndarray
    mass: np.ndarray
    potential: np.ndarray
    free: slice
    endpoint: int
    boundary_weight: float

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def quadratic(self, x: np.ndarray) -> float:
        """
        ``x^T K x``, summed as row sums plus squared differences. The large
        stiffness terms then never cancel.
        """
        row_sums = self.diag.copy()
        row_sums[:-1] += self.off
        row_sums[1:] += self.off
        return float(
            np.dot(row_sums, x * x) - np.dot(self.off, np.diff(x) ** 2)
        )

    def apply(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.off * x[1:]
        y[1:] += self.off * x[:-1]
        return y

    def endpoint_vector(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[self.endpoint] = 1.0
        return e

    def expand(self, x: np.ndarray) -> np.ndarray:
        """
        Put Dirichlet zeros back, giving values on every node.
        """
        full = np.zeros(self.nodes.shape[0])
        full[self.free] = x
        return full


def assemble_radial_form(
    nodes: np.ndarray,
    stiffness: np.ndarray,
    potential: np.ndarray,
    weight: np.ndarray,
    endpoint: int = -1,
    boundary_weight: float = 1.0,
    dirichlet_left: bool = False,
    dirichlet_right: bool = False,
) -> RadialForm:
    """
    Assemble the form from coefficient values at the Gauss points of
    ``gauss_points(nodes)``.

    :param stiffness:
        ``p`` at the Gauss points.
    :param potential:
        ``q`` at the Gauss points.
    :param weight:
        ``m`` at the Gauss points - the weight of the L2 mass.
    :param endpoint:
        Index (into the free nodes) carrying the boundary term.
    :param boundary_weight:
        Factor of ``|f(endpoint)|^2`` in the Steklov denominator and the
        Robin term.

    """
    points, weights = gauss_points(nodes)
    h = np.diff(nodes)[:, None]
    phi_left = (nodes[1:, None] - points) / h
    phi_right = (points - nodes[:-1, None]) / h

    grad = np.sum(weights * stiffness, axis=1) / h[:, 0] ** 2
    k_ll = grad + np.sum(weights * potential * phi_left**2, axis=1)
    k_lr = -grad + np.sum(weights * potential * phi_left * phi_right, axis=1)
    k_rr = grad + np.sum(weights * potential * phi_right**2, axis=1)

    n = nodes.shape[0]
    diag = np.zeros(n)
    diag[:-1] += k_ll
    diag[1:] += k_rr

    mass = np.zeros(n)
    mass[:-1] += np.sum(weights * weight * phi_left, axis=1)
    mass[1:] += np.sum(weights * weight * phi_right, axis=1)

    cell_potential = np.stack(
        (
            np.sum(weights * potential * phi_left, axis=1),
            np.sum(weights * potential * phi_right, axis=1),
        ),
        axis=1,
    )

    start = 1 if dirichlet_left else 0
    stop = n - 1 if dirichlet_right else n
    free = slice(start, stop)

    return RadialForm(
        nodes=nodes,
        diag=diag[free],
        off=k_lr[start : stop - 1],
        mass=mass[free],
        potential=cell_potential,
        free=free,
        endpoint=endpoint,
        boundary_weight=boundary_weight,
    )


def _banded(form: RadialForm, beta: float = 0.0) -> np.ndarray:
    upper = np.zeros((2, form.size))
    upper[0, 1:] = form.off
    upper[1] = form.diag
    upper[1, form.endpoint] += beta * form.boundary_weight
    return upper


def steklov_value(form: RadialForm) -> t.Tuple[float, np.ndarray]:
    """
    Minimum of ``form(f) / (boundary_weight * f(endpoint)^2)``.

    The denominator has rank one, so the minimum is ``1 / (w e^T K^-1 e)``
    and the minimiser is ``K^-1 e``, returned with ``f(endpoint) = 1``.
    """
    solution = scipy.linalg.solveh_banded(
        _banded(form), form.endpoint_vector()
    )
    value = 1.0 / (form.boundary_weight * solution[form.endpoint])
    return value, solution / solution[form.endpoint]


def robin_eigenpair(form: RadialForm, beta: float) -> Eigenpair:
    """
    Lowest eigenpair of ``form(f) + beta * w * f(endpoint)^2`` against the
    lumped mass.

    The tridiagonal pencil is symmetrised by the lumped mass and handed to
    LAPACK bisection. The returned value is the Rayleigh quotient of the
    eigenvector, evaluated with the form itself, which keeps it accurate
    near zero.
    """
    root_mass = np.sqrt(form.mass)
    diag = form.diag.copy()
    diag[form.endpoint] += beta * form.boundary_weight

    _, vectors = scipy.linalg.eigh_tridiagonal(
        diag / form.mass,
        form.off / (root_mass[:-1] * root_mass[1:]),
        select="i",
        select_range=(0, 0),
    )
    x = vectors[:, 0] / root_mass
    if x[form.endpoint] < 0:
        x = -x

    norm = float(np.dot(form.mass, x * x))
    endpoint_value = x[form.endpoint]
    value = (
        form.quadratic(x) + beta * form.boundary_weight * endpoint_value**2
    ) / norm

    applied = form.apply(x)
    applied[form.endpoint] += beta * form.boundary_weight * endpoint_value
    scale = np.abs(form.diag).max() + 2.0 * np.abs(form.off).max()
    residual = float(
        np.linalg.norm(applied - value * form.mass * x)
        / (scale * np.linalg.norm(x))
    )

    return Eigenpair(
        value=value,
        vector=x / math.sqrt(norm),
        iterations=1,
        residual=residual,
    )


def robin_root(
    form: RadialForm,
    guess: float,
    max_doublings: int = 80,
) -> t.Tuple[float, int]:
    """
    The unique ``beta < 0`` where the lowest Robin eigenvalue crosses zero.

    The lower end of the bracket starts at ``-guess`` and is doubled until
    the eigenvalue is negative; the eigenvalue is increasing in ``beta``
    and positive at ``beta = 0``.

    :returns:
        The root, and the number of eigenvalue evaluations.

    """
    evaluations = 0

    def lowest(beta: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return robin_eigenpair(form, beta).value

    upper = 0.0
    if lowest(upper) <= 0.0:
        raise BracketFailure(
            "The lowest eigenvalue isn't positive at beta = 0 - the form "
            "isn't positive definite."
        )

    lower = -abs(guess) if guess else -1.0
    samples = []
    for _ in range(max_doublings):
        value = lowest(lower)
        samples.append((lower, value))
        if value < 0.0:
            break
        upper = lower
        lower *= 2.0
    else:
        raise BracketFailure(f"No sign change found, samples: {samples}")

    root = brentq(
        lowest,
        lower,
        upper,
        xtol=1e-15 * abs(lower),
        rtol=4 * np.finfo(float).eps,
        maxiter=200,
    )
    return root, evaluations


def consistent_flux(form: RadialForm, values: np.ndarray) -> np.ndarray:
    """
    Nodal flux ``Y(x_i) = int_0^{x_i} q f dx`` of a solution on every node.

    This is the flux the discrete equations conserve: for the Steklov
    minimiser with ``f(endpoint) = 1`` it ends at exactly the eigenvalue.
    """
    cells = (
        form.potential[:, 0] * values[:-1] + form.potential[:, 1] * values[1:]
    )
    return np.concatenate(([0.0], np.cumsum(cells)))
