from __future__ import annotations
from dataclasses import dataclass
import logging

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from magsteklov.meshing.mesh import Mesh
from magsteklov.torsion.exceptions import SolverFailure


logger = logging.getLogger(__file__)


RESIDUAL_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class ScalarField:
    mesh: Mesh
    values: np.ndarray
    gradients: np.ndarray

    @property
    def maximum(self) -> float:
        return float(self.values.max())

    def integral(self) -> float:
        per_triangle = self.values[self.mesh.triangles].mean(axis=1)
        return float(np.dot(self.mesh.signed_areas, per_triangle))

    def dirichlet_energy(self) -> float:
        return float(
            np.dot(
                self.mesh.signed_areas, np.sum(self.gradients**2, axis=1)
            )
        )


@dataclass(frozen=True, eq=False)
class VectorField:
    """
    A vector field which is constant on every triangle.
    """

    mesh: Mesh
    values: np.ndarray


def stiffness_matrix(mesh: Mesh) -> scipy.sparse.csr_matrix:
    """
    ``S_ij = int grad phi_i . grad phi_j`` for linear elements.
    """
    gradients = mesh.basis_gradients
    local = np.einsum("tik,tjk->tij", gradients, gradients)
    local *= mesh.signed_areas[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    columns = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_nodes
    return scipy.sparse.coo_matrix(
        (local.ravel(), (rows, columns)), shape=(n, n)
    ).tocsr()


def mass_matrix(mesh: Mesh) -> scipy.sparse.csr_matrix:
    """
    Consistent mass ``M_ij = int phi_i phi_j``.
    """
    reference = (np.ones((3, 3)) + np.eye(3)) / 12.0
    local = mesh.signed_areas[:, None, None] * reference[None, :, :]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    columns = np.tile(mesh.triangles, (1, 3)).ravel()
    n = mesh.n_nodes
    return scipy.sparse.coo_matrix(
        (local.ravel(), (rows, columns)), shape=(n, n)
    ).tocsr()


def load_vector(mesh: Mesh) -> np.ndarray:
    """
    ``F_i = int phi_i``.
    """
    load = np.zeros(mesh.n_nodes)
    np.add.at(
        load,
        mesh.triangles.ravel(),
        np.repeat(mesh.signed_areas / 3.0, 3),
    )
    return load


def field_gradients(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    return np.einsum(
        "tik,ti->tk", mesh.basis_gradients, values[mesh.triangles]
    )


def solve_torsion(mesh: Mesh) -> ScalarField:
    """
    Linear element solution of ``-laplace(psi) = 1`` with ``psi = 0`` on
    the boundary.

    :raises SolverFailure:
        If the residual exceeds 1e-12 relative, or an interior value isn't
        positive.

    """
    interior = mesh.interior_nodes
    if interior.shape[0] == 0:
        raise SolverFailure("The mesh has no interior nodes.")

    stiffness = stiffness_matrix(mesh)
    load = load_vector(mesh)
    system = stiffness[interior][:, interior].tocsc()
    rhs = load[interior]

    solution = scipy.sparse.linalg.spsolve(system, rhs)
    residual = float(
        np.linalg.norm(system @ solution - rhs) / np.linalg.norm(rhs)
    )
    if not np.isfinite(residual) or residual > RESIDUAL_TOLERANCE:
        raise SolverFailure(
            f"The torsion solve only reached a residual of {residual:.3e}."
        )

    if solution.min() <= 0.0:
        raise SolverFailure(
            f"The torsion function has a non-positive interior value "
            f"{solution.min()!r} - the mesh has badly shaped triangles."
        )

    values = np.zeros(mesh.n_nodes)
    values[interior] = solution
    field = ScalarField(
        mesh=mesh, values=values, gradients=field_gradients(mesh, values)
    )
    logger.info(
        f"Torsion solve: {interior.shape[0]} unknowns, max psi "
        f"{field.maximum!r}, residual {residual:.2e}."
    )
    return field


def vector_potential(psi: ScalarField) -> VectorField:
    """
    The torsion gauge ``A = (d psi / dy, -d psi / dx)`` on every triangle.
    """
    gradients = psi.gradients
    return VectorField(
        mesh=psi.mesh, values=np.stack((gradients[:, 1], -gradients[:, 0]), 1)
    )
