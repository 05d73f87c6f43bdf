import math
from unittest import TestCase

from hypothesis import given
from hypothesis import strategies as st
import numpy as np

from magsteklov.geometry.domains import build_domain, domain_metrics
from magsteklov.geometry.exceptions import NotSimple
from magsteklov.shared.exceptions import InvalidParameters


PLUS = [
    (0.5, -0.5),
    (1.5, -0.5),
    (1.5, 0.5),
    (0.5, 0.5),
    (0.5, 1.5),
    (-0.5, 1.5),
    (-0.5, 0.5),
    (-1.5, 0.5),
    (-1.5, -0.5),
    (-0.5, -0.5),
    (-0.5, -1.5),
    (0.5, -1.5),
]


class TestBuildDomain(TestCase):
    def test_square_alias(self):
        """
        Make sure ``square`` builds a rectangle with equal sides.
        """
        domain = build_domain({"family": "square", "params": {"side": 2.0}})
        self.assertEqual(domain.family, "rectangle")
        self.assertEqual(domain.params, (2.0, 2.0))

    def test_named_and_positional(self):
        named = build_domain(
            {"family": "ellipse", "params": {"a": 1.2, "b": 0.5}}
        )
        positional = build_domain({"family": "ellipse", "params": [1.2, 0.5]})
        self.assertEqual(named, positional)

    def test_perturbed_disk_bound(self):
        """
        Make sure the amplitude is limited by 1 / (1 + k^2).
        """
        with self.assertRaises(InvalidParameters):
            build_domain(
                {
                    "family": "perturbed-disk",
                    "params": {"epsilon": 0.35, "k": 2},
                }
            )

        domain = build_domain(
            {"family": "perturbed-disk", "params": {"epsilon": 0.35, "k": 1}}
        )
        self.assertEqual(domain.params, (0.35, 1.0, 1.0))

    def test_invalid(self):
        with self.assertRaises(InvalidParameters):
            build_domain({"family": "hexagon"})

        with self.assertRaises(InvalidParameters):
            build_domain({"family": "disk", "params": [-1.0]})

        with self.assertRaises(InvalidParameters):
            build_domain({"family": "regular-polygon", "params": [2, 1.0]})

    def test_self_intersecting(self):
        """
        Make sure a bow tie is rejected.
        """
        with self.assertRaises(NotSimple):
            build_domain(
                {
                    "family": "polygon",
                    "vertices": [(0, 0), (2, 2), (2, 0), (0, 1)],
                }
            )

    def test_clockwise_vertices(self):
        """
        Make sure clockwise vertices are reversed.
        """
        domain = build_domain(
            {"family": "polygon", "vertices": [(0, 0), (0, 1), (1, 1), (1, 0)]}
        )
        self.assertAlmostEqual(domain_metrics(domain).area, 1.0)

    def test_normalize(self):
        """
        Make sure normalisation rescales to the requested size, keeping the
        center.
        """
        domain = build_domain(
            {
                "family": "ellipse",
                "params": [1.2, 0.5],
                "center": (1.0, 2.0),
                "normalize": {"area": math.pi},
            }
        )
        metrics = domain_metrics(domain)
        self.assertAlmostEqual(metrics.area, math.pi, places=10)
        self.assertEqual(domain.center, (1.0, 2.0))
        np.testing.assert_allclose(metrics.centroid, (1.0, 2.0), atol=1e-10)

        domain = build_domain(
            {
                "family": "square",
                "params": [1.0],
                "normalize": {"perimeter": 2.0 * math.pi},
            }
        )
        self.assertAlmostEqual(
            domain_metrics(domain).perimeter, 2.0 * math.pi, places=12
        )


class TestMetrics(TestCase):
    def test_disk(self):
        disk = build_domain({"family": "disk", "params": [2.0]})
        metrics = domain_metrics(disk)
        self.assertAlmostEqual(metrics.area, 4.0 * math.pi)
        self.assertAlmostEqual(metrics.perimeter, 4.0 * math.pi)
        self.assertTrue(metrics.convex)
        self.assertEqual(metrics.symmetry, "full-rotational")

    def test_circular_ellipse(self):
        """
        Make sure the quadrature metrics reduce to the circle.
        """
        metrics = domain_metrics(
            build_domain({"family": "ellipse", "params": [1.0, 1.0]})
        )
        self.assertAlmostEqual(metrics.area, math.pi, places=10)
        self.assertAlmostEqual(metrics.perimeter, 2.0 * math.pi, places=10)

    @given(
        st.floats(min_value=0.2, max_value=5.0),
        st.floats(min_value=0.2, max_value=5.0),
    )
    def test_isoperimetric(self, a: float, b: float):
        """
        Make sure L^2 >= 4 pi |domain| for ellipses.
        """
        metrics = domain_metrics(
            build_domain({"family": "ellipse", "params": [a, b]})
        )
        self.assertGreaterEqual(
            metrics.perimeter**2,
            4.0 * math.pi * metrics.area * (1.0 - 1e-12),
        )

    def test_regular_polygon(self):
        """
        Make sure the area matches n R^2 sin(2 pi / n) / 2.
        """
        metrics = domain_metrics(
            build_domain({"family": "regular-polygon", "params": [6, 1.0]})
        )
        self.assertAlmostEqual(metrics.area, 3.0 * math.sin(math.pi / 3.0))
        self.assertAlmostEqual(metrics.perimeter, 6.0)

    def test_convexity(self):
        plus = build_domain({"family": "polygon", "vertices": PLUS})
        self.assertFalse(domain_metrics(plus).convex)

        perturbed = build_domain(
            {"family": "perturbed-disk", "params": [0.1, 2, 1.0]}
        )
        self.assertTrue(domain_metrics(perturbed).convex)

    def test_scaling(self):
        """
        Make sure scaling multiplies the area by the square of the factor.
        """
        domain = build_domain(
            {"family": "perturbed-disk", "params": [0.05, 3]}
        )
        self.assertAlmostEqual(
            domain_metrics(domain.scaled(2.0)).area,
            4.0 * domain_metrics(domain).area,
            places=10,
        )


class TestSymmetry(TestCase):
    def test_families(self):
        for spec, expected in (
            ({"family": "rectangle", "params": [2.0, 1.0]}, "two-axes"),
            ({"family": "ellipse", "params": [2.0, 1.0]}, "two-axes"),
            ({"family": "perturbed-disk", "params": [0.05, 3]}, "two-axes"),
            ({"family": "perturbed-disk", "params": [0.3, 1]}, "none"),
            ({"family": "regular-polygon", "params": [5, 1.0]}, "two-axes"),
        ):
            self.assertEqual(
                domain_metrics(build_domain(spec)).symmetry, expected
            )

    def test_declared(self):
        """
        Make sure a declared symmetry is checked, and dropped if it's wrong.
        """
        plus = build_domain(
            {"family": "polygon", "vertices": PLUS, "symmetry": "two-axes"}
        )
        self.assertEqual(domain_metrics(plus).symmetry, "two-axes")

        with self.assertLogs(level="WARNING"):
            wrong = build_domain(
                {
                    "family": "polygon",
                    "vertices": [(0, 0), (3, 0), (1, 1)],
                    "symmetry": "central",
                }
            )
            self.assertEqual(domain_metrics(wrong).symmetry, "none")
