import math
import os
import tempfile
from unittest import TestCase

import numpy as np

from magsteklov.geometry.domains import build_domain
from magsteklov.meshing.triangulate import triangulate
from magsteklov.shared.tables import read_csv
from magsteklov.torsion.exceptions import NonMonotoneMu, WeightBelowBound
from magsteklov.torsion.levels import LevelTable, level_statistics
from magsteklov.torsion.solver import solve_torsion
from magsteklov.torsion.weights import (
    FOUR_PI,
    BlendedWeight,
    ConstantWeight,
    LevelOptions,
    WeightTable,
    weight_function,
)


def synthetic_table(mu, gamma) -> LevelTable:
    levels = np.linspace(0.1, 0.9, len(mu))
    return LevelTable(
        levels=levels,
        mu=np.asarray(mu, dtype=float),
        gamma=np.asarray(gamma, dtype=float),
        derivative=np.asarray(gamma, dtype=float),
        t_star=1.0,
        area=1.0,
        boundary_gamma=float(gamma[0]),
    )


class TestWeightFunction(TestCase):
    def test_square(self):
        """
        Make sure the square's weight is above 4 pi, and grows towards the
        boundary where the corners make 1 / |grad psi| large.
        """
        square = build_domain({"family": "square", "params": [1.0]})
        mesh = triangulate(square, 0.05)
        weight = weight_function(level_statistics(solve_torsion(mesh), 64))

        self.assertGreaterEqual(weight.minimum, FOUR_PI)
        self.assertGreater(weight.maximum, 1.1 * FOUR_PI)
        self.assertAlmostEqual(weight.a_star, mesh.area)
        self.assertEqual(weight.grid[-1], weight.a_star)
        self.assertTrue(np.all(np.diff(weight.grid) > 0.0))

    def test_disk(self):
        disk = build_domain({"family": "disk", "params": [1.0]})
        mesh = triangulate(disk, 0.05)
        weight = weight_function(level_statistics(solve_torsion(mesh), 64))
        self.assertLess(weight.maximum, 1.05 * FOUR_PI)
        self.assertGreaterEqual(weight.minimum, FOUR_PI)

    def test_non_monotone(self):
        table = synthetic_table([0.9, 0.5, 0.6, 0.1], [13.0] * 4)
        with self.assertRaises(NonMonotoneMu):
            weight_function(table)

    def test_below_bound(self):
        table = synthetic_table([0.9, 0.6, 0.3, 0.1], [13.0, 13.0, 11.0, 13.0])
        with self.assertRaises(WeightBelowBound):
            weight_function(table, LevelOptions(core_fraction=0.0))

    def test_clamping(self):
        """
        Make sure small dips below 4 pi are clamped, with a warning.
        """
        gamma = [13.0, 12.5, 13.0, 13.0]
        table = synthetic_table([0.9, 0.6, 0.3, 0.1], gamma)
        with self.assertLogs(level="WARNING"):
            weight = weight_function(table, LevelOptions(core_fraction=0.0))
        self.assertEqual(weight.minimum, FOUR_PI)
        self.assertEqual(weight.raw.min(), 12.5)

    def test_core_fraction(self):
        """
        Make sure levels with tiny superlevel sets are left out.
        """
        table = synthetic_table([0.9, 0.6, 0.3, 0.01], [13.0] * 4)
        weight = weight_function(table, LevelOptions(core_fraction=0.05))
        self.assertEqual(weight.grid.tolist(), [0.3, 0.6, 0.9, 1.0])


class TestWeights(TestCase):
    def setUp(self):
        self.table = WeightTable(
            grid=np.array([0.1, 0.5, 1.0]),
            values=np.array([FOUR_PI, 2.0 * FOUR_PI, 3.0 * FOUR_PI]),
            a_star=1.0,
            endpoint=3.0 * FOUR_PI,
        )

    def test_interpolation(self):
        np.testing.assert_allclose(
            self.table(np.array([0.0, 0.1, 0.5, 1.0])),
            [FOUR_PI, FOUR_PI, 2.0 * FOUR_PI, 3.0 * FOUR_PI],
        )
        values = self.table(np.linspace(0.1, 1.0, 50))
        self.assertTrue(np.all(np.diff(values) >= 0.0))

    def test_truncated(self):
        """
        Make sure truncation caps the weight at 4 pi n.
        """
        capped = self.table.truncated(2)
        self.assertEqual(capped.maximum, 2.0 * FOUR_PI)
        self.assertEqual(float(capped(np.array(1.0))), 2.0 * FOUR_PI)
        self.assertEqual(self.table.maximum, 3.0 * FOUR_PI)

    def test_constant(self):
        weight = ConstantWeight(a_star=math.pi)
        np.testing.assert_array_equal(weight(np.ones(3)), FOUR_PI)
        self.assertEqual(weight.truncated(1).value, FOUR_PI)
        weight = ConstantWeight(a_star=2.0, value=3.0 * FOUR_PI)
        self.assertEqual(weight.truncated(2).value, 2.0 * FOUR_PI)

    def test_blended(self):
        blend = BlendedWeight(
            first=ConstantWeight(a_star=1.0),
            second=ConstantWeight(a_star=1.0, value=2.0 * FOUR_PI),
            z=0.5,
        )
        self.assertEqual(blend.a_star, 1.0)
        np.testing.assert_allclose(blend(np.ones(2)), 1.5 * FOUR_PI)
        np.testing.assert_allclose(blend.truncated(1)(np.ones(2)), FOUR_PI)

    def test_csv(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "weight.csv")
            self.table.truncated(2).to_csv(path)
            rows = read_csv(path)
        self.assertEqual(len(rows), 3)
        self.assertEqual(float(rows[-1]["G"]), 2.0 * FOUR_PI)
