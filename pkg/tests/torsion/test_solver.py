import math
from unittest import TestCase

import numpy as np

from magsteklov.geometry.domains import build_domain
from magsteklov.meshing.triangulate import refinement_sequence, triangulate
from magsteklov.torsion.solver import (
    load_vector,
    mass_matrix,
    solve_torsion,
    stiffness_matrix,
    vector_potential,
)


UNIT_SQUARE = build_domain({"family": "square", "params": [1.0]})
DISK = build_domain({"family": "disk", "params": [1.0]})

# psi at the center of the unit square, from its Fourier series.
SQUARE_CENTER = 0.07367


class TestMatrices(TestCase):
    def test_assembly(self):
        """
        Make sure constants are in the kernel of the stiffness matrix, and
        the mass matrix and load vector integrate 1 to the area.
        """
        mesh = triangulate(DISK, 0.3)
        ones = np.ones(mesh.n_nodes)

        np.testing.assert_allclose(
            stiffness_matrix(mesh) @ ones, 0.0, atol=1e-12
        )
        self.assertAlmostEqual(ones @ mass_matrix(mesh) @ ones, mesh.area)
        self.assertAlmostEqual(load_vector(mesh).sum(), mesh.area)

    def test_linear_energy(self):
        """
        Make sure ``int |grad x|^2`` is the area.
        """
        mesh = triangulate(UNIT_SQUARE, 0.25)
        x = mesh.nodes[:, 0]
        self.assertAlmostEqual(x @ stiffness_matrix(mesh) @ x, 1.0)


class TestSolveTorsion(TestCase):
    def test_disk(self):
        """
        Make sure the disk gives (1 - r^2) / 4.
        """
        mesh = refinement_sequence(DISK, 0.2, 1)[-1]
        psi = solve_torsion(mesh)

        r2 = np.sum(mesh.nodes**2, axis=1)
        np.testing.assert_allclose(psi.values, 0.25 * (1.0 - r2), atol=3e-3)
        self.assertAlmostEqual(psi.maximum, 0.25, delta=3e-3)
        self.assertTrue(np.all(psi.values[mesh.boundary_nodes] == 0.0))

        # int psi = int |grad psi|^2 = pi / 8
        self.assertAlmostEqual(psi.integral(), math.pi / 8.0, delta=5e-3)
        self.assertAlmostEqual(
            psi.dirichlet_energy(), psi.integral(), places=10
        )

    def test_square(self):
        mesh = triangulate(UNIT_SQUARE, 0.1, refinement_levels=1)
        psi = solve_torsion(mesh)
        self.assertAlmostEqual(psi.maximum, SQUARE_CENTER, delta=1e-3)

    def test_convergence(self):
        """
        Make sure the torsional rigidity converges at second order under
        uniform refinement.
        """
        meshes = refinement_sequence(UNIT_SQUARE, 0.1, 2)
        rigidity = [solve_torsion(i).integral() for i in meshes]
        factor = (rigidity[1] - rigidity[0]) / (rigidity[2] - rigidity[1])
        self.assertGreaterEqual(factor, 3.5)

    def test_vector_potential(self):
        """
        Make sure the torsion gauge is the gradient of psi turned by a
        quarter, one vector per triangle.
        """
        mesh = triangulate(UNIT_SQUARE, 0.25)
        psi = solve_torsion(mesh)
        potential = vector_potential(psi)

        self.assertEqual(potential.values.shape, (mesh.n_triangles, 2))
        np.testing.assert_allclose(
            np.sum(potential.values * psi.gradients, axis=1), 0.0, atol=1e-14
        )
        np.testing.assert_allclose(
            np.linalg.norm(potential.values, axis=1),
            np.linalg.norm(psi.gradients, axis=1),
        )
