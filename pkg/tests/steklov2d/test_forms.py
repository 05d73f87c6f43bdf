from unittest import TestCase

import numpy as np
import scipy.sparse.linalg

from magsteklov.geometry.domains import build_domain
from magsteklov.meshing.triangulate import triangulate
from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.steklov2d.exceptions import MissingTorsionField
from magsteklov.steklov2d.forms import (
    assemble_forms,
    boundary_mass,
    symmetric_potential,
)
from magsteklov.torsion.solver import solve_torsion


class TestForms(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.mesh = triangulate(
            build_domain({"family": "ellipse", "params": [1.2, 0.8]}), 0.2
        )
        cls.psi = solve_torsion(cls.mesh)

    def test_hermitian(self):
        for gauge, psi in (("torsion", self.psi), ("symmetric", None)):
            forms = assemble_forms(self.mesh, 0.7, gauge=gauge, psi=psi)
            difference = forms.K - forms.K.conj().T
            self.assertLess(scipy.sparse.linalg.norm(difference), 1e-12)

    def test_constant_energy(self):
        """
        Make sure the energy of a constant is b^2 int |A|^2.
        """
        forms = assemble_forms(self.mesh, 0.7, gauge="symmetric")
        ones = np.ones(self.mesh.n_nodes)
        energy = np.vdot(ones, forms.K @ ones)
        self.assertAlmostEqual(energy.imag, 0.0)
        self.assertGreater(energy.real, 0.0)

        # int |A|^2 = int r^2 / 4, by the edge midpoint rule.
        p = self.mesh.nodes[self.mesh.triangles]
        midpoints = 0.5 * (p + np.roll(p, -1, axis=1))
        squared = np.sum(symmetric_potential(midpoints) ** 2, axis=2)
        expected = 0.49 * np.sum(self.mesh.signed_areas * squared.mean(axis=1))
        self.assertAlmostEqual(energy.real, expected)

    def test_boundary_mass(self):
        """
        Make sure the boundary mass integrates 1 to the perimeter of the
        mesh boundary, consistent or lumped.
        """
        ones = np.ones(self.mesh.n_nodes)
        consistent = ones @ boundary_mass(self.mesh) @ ones
        lumped = ones @ boundary_mass(self.mesh, lumped=True) @ ones
        self.assertAlmostEqual(consistent, lumped)
        self.assertAlmostEqual(consistent, 2.0 * np.pi * 1.0, delta=0.1)

    def test_errors(self):
        with self.assertRaises(MissingTorsionField):
            assemble_forms(self.mesh, 1.0, gauge="torsion")

        with self.assertRaises(InvalidParameters):
            assemble_forms(self.mesh, 1.0, gauge="coulomb")

        with self.assertRaises(InvalidParameters):
            assemble_forms(self.mesh, 0.0, gauge="symmetric")
