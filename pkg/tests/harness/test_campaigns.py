import math
from unittest import TestCase

from magsteklov.aux1d.kappa import kappa_value
from magsteklov.aux1d.problem import AuxOptions
from magsteklov.harness.campaigns import (
    aux_grid_error,
    campaign_items,
    run_campaigns,
    truncation_orders,
    verify_bounded,
    verify_exterior,
)
from magsteklov.geometry.domains import build_domain
from magsteklov.harness.config import (
    DEFAULT_CAMPAIGN,
    CampaignConfig,
    load_config,
)
from magsteklov.meshing.triangulate import refinement_sequence
from magsteklov.shared.exceptions import RegimeViolation
from magsteklov.torsion.weights import ConstantWeight, LevelOptions


TWO_PI = 2.0 * math.pi


class TestHelpers(TestCase):
    def test_truncation_orders(self):
        """
        Make sure the orders run up to the first multiple of 4 pi above the
        weight maximum.
        """
        self.assertEqual(truncation_orders(4.0 * math.pi), [1])
        self.assertEqual(truncation_orders(13.0), [1, 2])
        self.assertEqual(truncation_orders(30.0), [1, 2, 3])

    def test_aux_grid_error(self):
        """
        Make sure the grid error of kappa_1 is small, and shrinks with the
        grid.
        """
        weight = ConstantWeight(a_star=math.pi)
        errors = []
        for n_a in (500, 2000):
            options = AuxOptions(n_a=n_a)
            kappa = kappa_value(0.5, weight, options)
            errors.append(aux_grid_error(0.5, weight, kappa, options))

        self.assertLess(errors[1], 1e-4)
        self.assertLess(errors[1], errors[0])


class TestCampaignItems(TestCase):
    def test_default(self):
        """
        Make sure the items are numbered in config order, bounded first.
        """
        items = campaign_items(load_config(DEFAULT_CAMPAIGN))
        self.assertEqual(len(items), 12)
        self.assertEqual([i.index for i in items], list(range(12)))
        self.assertEqual(
            [i.kind for i in items], ["bounded"] * 6 + ["exterior"] * 6
        )
        self.assertEqual([i.b for i in items[:2]], [0.3, 0.7])
        self.assertEqual(items[0].domain.family, "ellipse")
        self.assertEqual(items[2].domain.family, "rectangle")


class TestVerifyExterior(TestCase):
    def test_disk(self):
        """
        Make sure the disk is the equality case.
        """
        domain = build_domain({"family": "disk", "params": [1.0]})
        record, report = verify_exterior(domain, 1.0, n_panels=64)

        self.assertTrue(record.passed)
        self.assertEqual(record.comparisons[0].kind, "eq")
        self.assertAlmostEqual(record.perimeter, TWO_PI)
        self.assertAlmostEqual(
            record.members["trial"].value,
            record.members["exterior_disk"].value,
        )
        self.assertEqual(record.trial["quotient"], report.quotient)

    def test_square(self):
        """
        Make sure the square is strictly below the exterior disk.
        """
        domain = build_domain(
            {
                "family": "square",
                "params": [1.0],
                "normalize": {"perimeter": TWO_PI},
            }
        )
        record, _ = verify_exterior(domain, 1.0, index=3)

        self.assertEqual(record.index, 3)
        self.assertEqual(record.domain, "rectangle")
        self.assertEqual(record.comparisons[0].kind, "lt")
        self.assertTrue(record.passed)

    def test_regime(self):
        """
        Make sure b L^2 > 4 pi^2 needs an override.
        """
        domain = build_domain({"family": "disk", "params": [1.0]})
        with self.assertRaises(RegimeViolation):
            verify_exterior(domain, 2.0)


class TestVerifyBounded(TestCase):
    def test_ellipse(self):
        """
        Make sure an ellipse at a reduced resolution gives the whole chain,
        with the members that agree on every mesh passing.
        """
        domain = build_domain(
            {
                "family": "ellipse",
                "params": {"a": 1.2, "b": 1.0 / 1.2},
            }
        )
        record, study = verify_bounded(
            domain,
            0.5,
            h=0.2,
            refinements=1,
            aux_options=AuxOptions(n_a=800),
            level_options=LevelOptions(n_levels=64),
            raise_on_violation=False,
        )

        self.assertEqual(
            set(record.members),
            {
                "perimeter_lambda",
                "lambda",
                "torsion_trial",
                "kappa_G",
                "kappa_4pi",
                "disk",
                "lambda_B",
                "lambda_B_prime",
            },
        )
        self.assertEqual(len(record.comparisons), 7)

        comparisons = {i.name: i for i in record.comparisons}
        self.assertTrue(comparisons["kappa_4pi = disk"].passed)
        self.assertTrue(comparisons["lambda <= trial"].passed)

        # kappa_G and its constant weight comparison share the mesh area.
        mesh_area = refinement_sequence(domain, 0.2, 1)[-1].area
        self.assertAlmostEqual(
            comparisons["kappa_G < kappa_4pi"].upper,
            kappa_value(
                0.5, ConstantWeight(a_star=mesh_area), AuxOptions(n_a=800)
            ),
            places=10,
        )

        self.assertAlmostEqual(record.area, math.pi, places=6)
        self.assertEqual(len(record.truncation), len(study.rows()))

    def test_regime(self):
        """
        Make sure b |domain| > pi needs an override.
        """
        domain = build_domain({"family": "disk", "params": [1.0]})
        with self.assertRaises(RegimeViolation):
            verify_bounded(domain, 1.5)


class TestRunCampaigns(TestCase):
    def test_empty(self):
        """
        Make sure an empty campaign passes trivially.
        """
        result = run_campaigns(CampaignConfig())
        self.assertTrue(result.report.passed)
        self.assertEqual(result.report.bounded, [])
        self.assertEqual(result.tables, {})

    def test_exterior(self):
        """
        Make sure records and tables are keyed by config order, with or
        without workers.
        """
        contents = {
            "exterior": [
                {
                    "domain": {"family": "disk", "params": [1.0]},
                    "b": [0.5, 1.0],
                }
            ],
            "n_panels": 32,
        }
        serial = run_campaigns(CampaignConfig.model_validate(contents))
        parallel = run_campaigns(
            CampaignConfig.model_validate({**contents, "workers": 2})
        )

        for result in (serial, parallel):
            self.assertTrue(result.report.passed)
            self.assertEqual(
                [i.b for i in result.report.exterior], [0.5, 1.0]
            )
            self.assertEqual(
                sorted(result.tables), ["trial_0.csv", "trial_1.csv"]
            )
            self.assertEqual(
                sorted(result.report.timing), ["exterior_0", "exterior_1"]
            )

        self.assertEqual(
            [i.members["trial"].value for i in serial.report.exterior],
            [i.members["trial"].value for i in parallel.report.exterior],
        )
