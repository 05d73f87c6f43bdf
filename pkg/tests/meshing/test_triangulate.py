import math
from unittest import TestCase

import numpy as np

from magsteklov.geometry.domains import build_domain
from magsteklov.meshing.exceptions import DisconnectedBoundary
from magsteklov.meshing.mesh import Mesh, boundary_trace, euler_characteristic
from magsteklov.meshing.triangulate import (
    MIN_ANGLE,
    boundary_samples,
    refine,
    refinement_sequence,
    triangulate,
)
from magsteklov.shared.exceptions import InvalidParameters


UNIT_SQUARE = build_domain({"family": "square", "params": [1.0]})
DISK = build_domain({"family": "disk", "params": [1.0]})


class TestTriangulate(TestCase):
    def test_square(self):
        """
        Make sure the unit square at h = 1/4 has 16 boundary nodes, whose
        weights add up to the perimeter.
        """
        mesh = triangulate(UNIT_SQUARE, 0.25)
        self.assertEqual(mesh.boundary_nodes.shape[0], 16)
        self.assertAlmostEqual(mesh.area, 1.0)

        trace = boundary_trace(mesh)
        self.assertEqual(trace.order.shape[0], 16)
        self.assertAlmostEqual(trace.perimeter, 4.0)

    def test_disk(self):
        mesh = triangulate(DISK, 0.2)
        self.assertAlmostEqual(mesh.area, math.pi, delta=0.02 * math.pi)
        self.assertGreaterEqual(mesh.min_angle(), MIN_ANGLE)
        self.assertEqual(euler_characteristic(mesh), 1)
        self.assertTrue(np.all(mesh.signed_areas > 0.0))

        # Boundary nodes lie on the circle.
        radii = np.linalg.norm(mesh.nodes[mesh.boundary_nodes], axis=1)
        np.testing.assert_allclose(radii, 1.0, atol=1e-12)

    def test_counterclockwise_trace(self):
        mesh = triangulate(
            build_domain({"family": "ellipse", "params": [1.2, 0.8]}), 0.15
        )
        points = mesh.nodes[boundary_trace(mesh).order]
        x, y = points[:, 0], points[:, 1]
        signed = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        self.assertGreater(signed, 0.0)

    def test_too_coarse(self):
        """
        Make sure meshes with fewer than 16 boundary nodes are refused.
        """
        with self.assertRaises(InvalidParameters):
            boundary_samples(UNIT_SQUARE, 0.5)

        with self.assertRaises(InvalidParameters):
            triangulate(UNIT_SQUARE, -0.1)


class TestRefine(TestCase):
    def test_quadrisection(self):
        mesh = triangulate(UNIT_SQUARE, 0.25)
        refined = refine(mesh)

        self.assertEqual(refined.n_triangles, 4 * mesh.n_triangles)
        self.assertEqual(refined.level, 1)
        self.assertEqual(refined.h, 0.125)
        self.assertAlmostEqual(refined.area, 1.0)
        self.assertEqual(refined.boundary_nodes.shape[0], 32)
        self.assertEqual(euler_characteristic(refined), 1)
        self.assertAlmostEqual(boundary_trace(refined).perimeter, 4.0)

    def test_boundary_projection(self):
        """
        Make sure new boundary nodes are put on the curved boundary, so the
        area converges to pi.
        """
        meshes = refinement_sequence(DISK, 0.2, 2)
        errors = [abs(i.area - math.pi) for i in meshes]
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[2], errors[1])

        finest = meshes[-1]
        radii = np.linalg.norm(finest.nodes[finest.boundary_nodes], axis=1)
        np.testing.assert_allclose(radii, 1.0, atol=1e-12)
        self.assertGreaterEqual(finest.min_angle(), MIN_ANGLE)

    def test_scaled(self):
        mesh = triangulate(DISK, 0.2).scaled(2.0)
        self.assertAlmostEqual(mesh.domain.params[0], 2.0)
        self.assertAlmostEqual(
            mesh.area, 4.0 * triangulate(DISK, 0.2).area, places=10
        )


class TestBoundaryTrace(TestCase):
    def test_disconnected(self):
        """
        Make sure two separate triangles are rejected.
        """
        nodes = np.array(
            [
                [0.0, 0.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [3.0, 0.0],
                [4.0, 0.0],
                [3.0, 1.0],
            ]
        )
        triangles = np.array([[0, 1, 2], [3, 4, 5]])
        mesh = Mesh(
            nodes=nodes,
            triangles=triangles,
            boundary_edges=np.array(
                [[0, 1], [1, 2], [2, 0], [3, 4], [4, 5], [5, 3]]
            ),
            boundary=np.ones(6, dtype=bool),
            h=1.0,
            boundary_parameters=np.full(6, np.nan),
        )
        with self.assertRaises(DisconnectedBoundary):
            boundary_trace(mesh)
