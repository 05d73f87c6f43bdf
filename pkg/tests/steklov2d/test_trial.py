from unittest import TestCase

import numpy as np

from magsteklov.aux1d.kappa import kappa1
from magsteklov.aux1d.problem import AuxOptions, AuxProblem
from magsteklov.geometry.domains import build_domain
from magsteklov.meshing.triangulate import triangulate
from magsteklov.steklov2d.forms import assemble_forms
from magsteklov.steklov2d.solvers import lambda_dtn
from magsteklov.steklov2d.trial import superlevel_area, torsion_trial_quotient
from magsteklov.torsion.levels import level_statistics
from magsteklov.torsion.solver import solve_torsion
from magsteklov.torsion.weights import weight_function


class TestTorsionTrial(TestCase):
    @classmethod
    def setUpClass(cls):
        domain = build_domain({"family": "ellipse", "params": [1.2, 0.8]})
        cls.mesh = triangulate(domain, 0.08)
        cls.psi = solve_torsion(cls.mesh)
        cls.levels = level_statistics(cls.psi, 64)
        cls.weight = weight_function(cls.levels)

    def test_superlevel_area(self):
        a = superlevel_area(self.psi, self.levels)
        np.testing.assert_allclose(
            a[self.mesh.boundary_nodes], self.levels.area
        )
        self.assertLess(a.min(), 0.05 * self.levels.area)
        self.assertTrue(np.all(a >= 0.0))

    def test_upper_bound(self):
        """
        Make sure the trial quotient bounds the discrete eigenvalue from
        above, and tracks kappa_1 / |boundary|.
        """
        b = 0.6
        forms = assemble_forms(self.mesh, b, psi=self.psi)
        result = kappa1(
            AuxProblem.from_options(b, self.weight, AuxOptions(n_a=1000))
        )
        trial = torsion_trial_quotient(forms, self.psi, self.levels, result)
        value = lambda_dtn(forms).value

        self.assertGreaterEqual(trial.quotient, value * (1.0 - 1e-8))
        self.assertAlmostEqual(trial.scaled / trial.kappa, 1.0, delta=0.05)
        self.assertEqual(trial.kappa, result.kappa)
