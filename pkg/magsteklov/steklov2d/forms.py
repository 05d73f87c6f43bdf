"""
Linear element forms of the magnetic problem::

    K(u, v) = int (grad u - i b A u) . conj(grad v - i b A v)
    M_b(u, v) = int_boundary u conj(v)
    M(u, v) = int u conj(v)
"""
from __future__ import annotations
from dataclasses import dataclass
import logging
import typing as t

import numpy as np
import scipy.sparse

from magsteklov.meshing.mesh import Mesh
from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.steklov2d.exceptions import MissingTorsionField
from magsteklov.torsion.solver import (
    ScalarField,
    mass_matrix,
    stiffness_matrix,
    vector_potential,
)


logger = logging.getLogger(__file__)


GAUGES = ("torsion", "symmetric")


@dataclass(frozen=True, eq=False)
class FormSet:
    mesh: Mesh
    K: scipy.sparse.csr_matrix
    M_boundary: scipy.sparse.csr_matrix
    M: scipy.sparse.csr_matrix
    b: float
    gauge: str


def _scatter(mesh: Mesh, local: np.ndarray) -> scipy.sparse.csr_matrix:
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    columns = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_nodes
    return scipy.sparse.coo_matrix(
        (local.ravel(), (rows, columns)), shape=(n, n)
    ).tocsr()


def boundary_mass(mesh: Mesh, lumped: bool = False) -> scipy.sparse.csr_matrix:
    """
    ``int_boundary phi_i phi_j`` over the boundary edges.
    """
    edges = mesh.boundary_edges
    lengths = np.linalg.norm(
        mesh.nodes[edges[:, 1]] - mesh.nodes[edges[:, 0]], axis=1
    )
    if lumped:
        local = np.array([[3.0, 0.0], [0.0, 3.0]]) / 6.0
    else:
        local = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    values = lengths[:, None, None] * local[None, :, :]
    rows = np.repeat(edges, 2, axis=1).ravel()
    columns = np.tile(edges, (1, 2)).ravel()
    n = mesh.n_nodes
    return scipy.sparse.coo_matrix(
        (values.ravel(), (rows, columns)), shape=(n, n)
    ).tocsr()


def _torsion_gauge_terms(
    mesh: Mesh, potential: np.ndarray
) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    With ``A`` constant on a triangle::

        int A . (phi_i grad phi_j - phi_j grad phi_i) = |T| / 3 A . (g_j - g_i)
        int |A|^2 phi_i phi_j = |A|^2 |T| (1 + delta_ij) / 12

    """
    areas = mesh.signed_areas
    projected = np.einsum("tik,tk->ti", mesh.basis_gradients, potential)
    cross = (areas / 3.0)[:, None, None] * (
        projected[:, None, :] - projected[:, :, None]
    )
    reference = (np.ones((3, 3)) + np.eye(3)) / 12.0
    squared = np.sum(potential**2, axis=1) * areas
    magnetic_mass = squared[:, None, None] * reference[None, :, :]
    return cross, magnetic_mass


def symmetric_potential(points: np.ndarray) -> np.ndarray:
    """
    ``A(x) = (-x_2, x_1) / 2``.
    """
    return 0.5 * np.stack((-points[..., 1], points[..., 0]), -1)


def _symmetric_gauge_terms(mesh: Mesh) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    The same integrals for the symmetric gauge, by the edge midpoint rule.
    """
    p = mesh.nodes[mesh.triangles]
    # Quadrature point q sits on the edge opposite vertex q.
    midpoints = np.stack(
        (
            0.5 * (p[:, 1] + p[:, 2]),
            0.5 * (p[:, 2] + p[:, 0]),
            0.5 * (p[:, 0] + p[:, 1]),
        ),
        1,
    )
    basis = 0.5 * (np.ones((3, 3)) - np.eye(3))
    potential = symmetric_potential(midpoints)
    weights = mesh.signed_areas / 3.0

    # projected[t, q, j] = A(x_q) . grad phi_j
    projected = np.einsum("tqk,tjk->tqj", potential, mesh.basis_gradients)
    first = np.einsum("qi,tqj->tij", basis, projected)
    cross = weights[:, None, None] * (first - first.transpose(0, 2, 1))

    squared = np.sum(potential**2, axis=2)
    magnetic_mass = weights[:, None, None] * np.einsum(
        "tq,qi,qj->tij", squared, basis, basis
    )
    return cross, magnetic_mass


def assemble_forms(
    mesh: Mesh,
    b: float,
    gauge: str = "torsion",
    psi: t.Optional[ScalarField] = None,
) -> FormSet:
    """
    Assemble the magnetic stiffness and both mass matrices.

    :param gauge:
        ``torsion`` uses the rotated gradient of ``psi``, constant on every
        triangle, and is integrated exactly. ``symmetric`` uses
        ``(-x_2, x_1) / 2`` with the edge midpoint rule.
    :raises MissingTorsionField:
        For the torsion gauge without a ``psi`` solved on ``mesh``.

    """
    if not b > 0:
        raise InvalidParameters("The field strength must be positive.")
    if gauge not in GAUGES:
        raise InvalidParameters(f"Unknown gauge {gauge!r}.")

    if gauge == "torsion":
        if psi is None or psi.mesh is not mesh:
            raise MissingTorsionField(
                "The torsion gauge needs the torsion function on this mesh."
            )
        cross, magnetic_mass = _torsion_gauge_terms(
            mesh, vector_potential(psi).values
        )
    else:
        cross, magnetic_mass = _symmetric_gauge_terms(mesh)

    magnetic = _scatter(mesh, 1j * b * cross + b * b * magnetic_mass)
    K = (stiffness_matrix(mesh) + magnetic).tocsr()

    logger.debug(
        f"Assembled {gauge} gauge forms, b={b!r}, {mesh.n_nodes} nodes."
    )
    return FormSet(
        mesh=mesh,
        K=K,
        M_boundary=boundary_mass(mesh),
        M=mass_matrix(mesh),
        b=b,
        gauge=gauge,
    )
