import math
from unittest import TestCase

import numpy as np

from magsteklov.aux1d.exceptions import NonPositiveForm, WeightOrderViolation
from magsteklov.aux1d.kappa import (
    kappa1,
    kappa_homotopy,
    kappa_value,
    mu_robin_1d,
    truncation_study,
)
from magsteklov.aux1d.problem import AuxOptions, AuxProblem
from magsteklov.disk.closed_form import lambda_disk
from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.torsion.weights import FOUR_PI, ConstantWeight, WeightTable


DISK_WEIGHT = ConstantWeight(a_star=math.pi)


class TestKappa1(TestCase):
    def test_disk(self):
        """
        Make sure the constant weight 4 pi on (0, pi) reproduces the unit
        disk: kappa_1 = 2 pi lambda_disk.
        """
        result = kappa1(AuxProblem.from_options(1.0, DISK_WEIGHT))
        self.assertAlmostEqual(
            result.kappa / (2.0 * math.pi * lambda_disk(1.0, 1.0)),
            1.0,
            delta=1e-4,
        )
        self.assertAlmostEqual(result.kappa, 2.0 * math.pi * 0.062016, 4)

    def test_routes(self):
        """
        Make sure the Schur and Robin routes agree.
        """
        result = kappa1(AuxProblem.from_options(0.7, DISK_WEIGHT))
        self.assertLess(result.route_gap, 1e-8)
        self.assertLess(result.residual, 1e-6 * result.kappa)
        self.assertEqual(result.f[-1], 1.0)
        self.assertEqual(result.Y[0], 0.0)

    def test_robin_sign(self):
        problem = AuxProblem.from_options(0.7, DISK_WEIGHT)
        kappa = kappa_value(0.7, DISK_WEIGHT)
        self.assertGreater(mu_robin_1d(problem, 0.9 * kappa), 0.0)
        self.assertLess(mu_robin_1d(problem, 1.1 * kappa), 0.0)

    def test_weight_monotone(self):
        """
        Make sure a larger weight gives a smaller value in the weak field
        regime.
        """
        larger = ConstantWeight(a_star=math.pi, value=2.0 * FOUR_PI)
        self.assertLess(
            kappa_value(0.5, larger), kappa_value(0.5, DISK_WEIGHT)
        )

    def test_invalid(self):
        with self.assertRaises(NonPositiveForm):
            AuxProblem.from_options(0.0, DISK_WEIGHT)

        with self.assertRaises(InvalidParameters):
            AuxProblem.from_options(
                1.0, ConstantWeight(a_star=math.pi, value=10.0)
            )

        with self.assertRaises(InvalidParameters):
            AuxProblem.from_options(1.0, DISK_WEIGHT, a_star=0.0)


class TestHomotopy(TestCase):
    def test_derivative(self):
        """
        Make sure the derivative formula matches finite differences,
        including the one sided ends.
        """
        rows = kappa_homotopy(
            0.5,
            DISK_WEIGHT,
            ConstantWeight(a_star=math.pi, value=2.0 * FOUR_PI),
            [0.0, 0.5, 1.0],
            AuxOptions(n_a=1000),
        )
        self.assertEqual([i.z for i in rows], [0.0, 0.5, 1.0])
        for row in rows:
            self.assertLess(row.relative_gap, 1e-3)
            self.assertLess(row.dkappa_formula, 0.0)

        kappas = [i.kappa for i in rows]
        self.assertTrue(kappas[0] > kappas[1] > kappas[2])

    def test_equal_weights(self):
        rows = kappa_homotopy(0.5, DISK_WEIGHT, DISK_WEIGHT, [0.5])
        self.assertEqual(rows[0].dkappa_formula, 0.0)
        self.assertLess(abs(rows[0].dkappa_fd), 1e-9)

    def test_order(self):
        with self.assertRaises(WeightOrderViolation):
            kappa_homotopy(
                0.5,
                ConstantWeight(a_star=math.pi, value=2.0 * FOUR_PI),
                DISK_WEIGHT,
                [0.5],
            )


class TestTruncation(TestCase):
    def test_study(self):
        """
        Make sure capping the weight at 4 pi n gives values which don't
        increase with n, and settle once the cap is above the weight.
        """
        weight = WeightTable(
            grid=np.array([0.5, 2.0, math.pi]),
            values=np.array([FOUR_PI, 1.5 * FOUR_PI, 2.5 * FOUR_PI]),
            a_star=math.pi,
            endpoint=2.5 * FOUR_PI,
        )
        study = truncation_study(0.5, weight, [1, 2, 3, 4])

        self.assertEqual(study.n, (1, 2, 3, 4))
        self.assertTrue(study.monotone)
        self.assertEqual(study.kappa[2], study.kappa[3])
        self.assertEqual(study.final_gap, 0.0)
        self.assertAlmostEqual(study.kappa[0], kappa_value(0.5, DISK_WEIGHT))
        self.assertEqual(study.rows()[0][0], 1)
