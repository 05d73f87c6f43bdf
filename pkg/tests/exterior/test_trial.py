import math
import os
import tempfile
from unittest import TestCase

from magsteklov.exterior.profile import lambda_disk_exterior
from magsteklov.exterior.trial import (
    trial_l2_comparison,
    trial_quotient_exterior,
)
from magsteklov.geometry.domains import build_domain
from magsteklov.geometry.exceptions import UnsupportedDomain
from magsteklov.shared.exceptions import HypothesisViolation, RegimeViolation
from magsteklov.shared.tables import read_csv

from tests.geometry.test_domains import PLUS


TWO_PI = 2.0 * math.pi


def perimeter_normalised(spec: dict):
    return build_domain({**spec, "normalize": {"perimeter": TWO_PI}})


class TestTrialQuotient(TestCase):
    def test_disk(self):
        """
        Make sure the disk reproduces the exterior disk value.
        """
        domain = build_domain({"family": "disk", "params": [1.0]})
        report = trial_quotient_exterior(domain, 1.0)

        self.assertAlmostEqual(report.comparison, lambda_disk_exterior(1.0))
        self.assertLessEqual(abs(report.margin), 1e-8 * report.comparison)
        self.assertTrue(report.checks_passed)
        self.assertLess(report.error_estimate, 1e-8)

    def test_shifted_disk(self):
        """
        Make sure the domain is centered before the moments are taken.
        """
        domain = build_domain(
            {"family": "disk", "params": [1.0], "center": (3.0, -2.0)}
        )
        report = trial_quotient_exterior(domain, 0.5)
        self.assertLessEqual(abs(report.margin), 1e-8 * report.comparison)
        self.assertLess(report.max_centroid_offset, 1e-12)

    def test_square(self):
        """
        Make sure the square with perimeter 2 pi is strictly below the disk,
        at the edge of the regime.
        """
        domain = perimeter_normalised({"family": "square", "params": [1.0]})
        report = trial_quotient_exterior(domain, 1.0)

        self.assertGreater(report.margin, 0.0)
        self.assertGreater(report.margin, 3.0 * report.error_estimate)
        self.assertTrue(report.checks_passed)
        self.assertAlmostEqual(report.perimeter, TWO_PI)
        self.assertGreater(report.min_hurwitz_gap, 0.0)

    def test_ellipse(self):
        domain = perimeter_normalised(
            {"family": "ellipse", "params": [1.2, 0.8333333333333334]}
        )
        report = trial_quotient_exterior(domain, 0.5)
        self.assertGreater(report.margin, 3.0 * report.error_estimate)

    def test_l2_comparison(self):
        """
        Make sure the trial state's mass doesn't exceed the disk's.
        """
        domain = perimeter_normalised(
            {"family": "regular-polygon", "params": [5, 1.0]}
        )
        report = trial_quotient_exterior(domain, 0.8)
        l2_mass, l2_mass_disk = trial_l2_comparison(report)
        self.assertGreater(l2_mass, 0.0)
        self.assertLessEqual(l2_mass, l2_mass_disk * (1.0 + 1e-12))

    def test_csv(self):
        domain = perimeter_normalised({"family": "square", "params": [1.0]})
        report = trial_quotient_exterior(domain, 0.5, n_panels=16, order=4)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "trial.csv")
            report.to_csv(path)
            rows = read_csv(path)

        self.assertEqual(len(rows), 64)
        self.assertEqual(
            list(rows[0].keys()),
            ["t", "sigma_length", "second_moment", "psi", "dpsi"],
        )


class TestHypotheses(TestCase):
    def test_asymmetric(self):
        domain = build_domain(
            {"family": "perturbed-disk", "params": [0.3, 1, 1.0]}
        )
        with self.assertRaises(HypothesisViolation):
            trial_quotient_exterior(domain, 0.5)

    def test_nonconvex(self):
        """
        Make sure nonconvex domains need the grid fallback.
        """
        domain = build_domain(
            {"family": "polygon", "vertices": PLUS, "symmetry": "two-axes"}
        )
        with self.assertRaises(UnsupportedDomain):
            trial_quotient_exterior(domain, 0.2)

    def test_regime(self):
        domain = perimeter_normalised({"family": "square", "params": [1.0]})
        with self.assertRaises(RegimeViolation):
            trial_quotient_exterior(domain, 2.0)
