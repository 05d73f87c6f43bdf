import math
from unittest import TestCase

import numpy as np

from magsteklov.geometry.contours import (
    lerp_point,
    marching_squares,
    values_to_index,
)


class TestHelpers(TestCase):
    def test_values_to_index(self):
        self.assertEqual(values_to_index([1.0, -1.0, -1.0, -1.0]), 8)
        self.assertEqual(values_to_index([-1.0, -1.0, -1.0, 1.0]), 1)
        self.assertEqual(values_to_index([1.0, 1.0, 1.0, 1.0]), 15)

    def test_lerp_point(self):
        point = lerp_point(np.zeros(2), np.array((1.0, 0.0)), -1.0, 3.0)
        np.testing.assert_allclose(point, (0.25, 0.0))

        # Clamped to the edge.
        end = np.array((1.0, 0.0))
        point = lerp_point(np.zeros(2), end, 1.0, 2.0)
        np.testing.assert_allclose(point, (0.0, 0.0))


class TestMarchingSquares(TestCase):
    def test_circle(self):
        """
        Make sure a level set of the radius is one closed loop, with the
        right length.
        """
        xs = np.linspace(-2.0, 2.0, 201)
        ys = np.linspace(-2.0, 2.0, 181)
        X, Y = np.meshgrid(xs, ys, indexing="ij")

        loops = marching_squares(np.hypot(X, Y), xs, ys, 1.0)
        self.assertEqual(len(loops), 1)

        loop = loops[0]
        radii = np.hypot(loop[:, 0], loop[:, 1])
        np.testing.assert_allclose(radii, 1.0, atol=1e-3)

        closed = np.vstack((loop, loop[:1]))
        length = np.linalg.norm(np.diff(closed, axis=0), axis=1).sum()
        self.assertAlmostEqual(length, 2.0 * math.pi, delta=1e-3)

    def test_two_components(self):
        """
        Make sure separate components come back separately, longest first.
        """
        xs = np.linspace(-4.0, 4.0, 161)
        ys = np.linspace(-2.0, 2.0, 81)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        values = np.minimum(
            np.hypot(X + 2.0, Y) / 1.5, np.hypot(X - 2.0, Y) / 0.5
        )

        loops = marching_squares(values, xs, ys, 1.0)
        self.assertEqual(len(loops), 2)
        self.assertGreater(len(loops[0]), len(loops[1]))
        self.assertLess(loops[0][:, 0].mean(), 0.0)

    def test_empty(self):
        xs = np.linspace(0.0, 1.0, 5)
        values = np.ones((5, 5))
        self.assertEqual(marching_squares(values, xs, xs, 2.0), [])

    def test_open(self):
        """
        Make sure a contour leaving the grid is returned as an open polyline
        walked from one end.
        """
        xs = np.linspace(0.0, 1.0, 11)
        X, _ = np.meshgrid(xs, xs, indexing="ij")

        loops = marching_squares(X, xs, xs, 0.55)
        self.assertEqual(len(loops), 1)
        np.testing.assert_allclose(loops[0][:, 0], 0.55)
        self.assertEqual(len(loops[0]), 11)
        self.assertAlmostEqual(abs(loops[0][-1, 1] - loops[0][0, 1]), 1.0)
