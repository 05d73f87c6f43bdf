import math
from unittest import TestCase

import numpy as np

from magsteklov.geometry.domains import build_domain
from magsteklov.meshing.triangulate import triangulate
from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.torsion.levels import level_statistics
from magsteklov.torsion.solver import solve_torsion


class TestLevelStatistics(TestCase):
    @classmethod
    def setUpClass(cls):
        disk = build_domain({"family": "disk", "params": [1.0]})
        mesh = triangulate(disk, 0.05)
        cls.psi = solve_torsion(mesh)
        cls.table = level_statistics(cls.psi, n_levels=64)

    def test_disk_areas(self):
        """
        Make sure the superlevel areas follow pi (1 - 4 t).
        """
        table = self.table
        expected = table.area * (1.0 - table.levels / table.t_star)
        interior = slice(2, 48)
        np.testing.assert_allclose(
            table.mu[interior], expected[interior], rtol=0.02, atol=2e-3
        )
        self.assertTrue(np.all(np.diff(table.mu) < 0.0))
        self.assertAlmostEqual(table.area, self.psi.mesh.area)

    def test_disk_gamma(self):
        """
        Make sure the contour integral of the disk is 4 pi at every level.
        """
        interior = slice(1, 48)
        np.testing.assert_allclose(
            self.table.gamma[interior], 4.0 * math.pi, rtol=0.03
        )
        self.assertAlmostEqual(
            self.table.boundary_gamma, 4.0 * math.pi, delta=0.4
        )

    def test_coarea(self):
        """
        Make sure gamma matches -d mu / dt away from the ends.
        """
        self.assertLess(self.table.coarea_gap[1:48].max(), 0.05)

    def test_level_grid(self):
        levels = self.table.levels
        delta = self.table.t_star / (4.0 * 64)
        self.assertEqual(levels.shape, (64,))
        self.assertAlmostEqual(levels[0], delta)
        self.assertAlmostEqual(levels[-1], self.table.t_star - delta)

    def test_too_few_levels(self):
        with self.assertRaises(InvalidParameters):
            level_statistics(self.psi, n_levels=8)
