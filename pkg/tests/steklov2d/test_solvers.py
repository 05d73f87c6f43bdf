from unittest import TestCase

import numpy as np
import scipy.linalg

from magsteklov.disk.closed_form import lambda_disk
from magsteklov.geometry.domains import build_domain
from magsteklov.meshing.triangulate import (
    MeshOptions,
    refinement_sequence,
    triangulate,
)
from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.steklov2d.forms import assemble_forms
from magsteklov.steklov2d.solvers import (
    lambda_dtn,
    lambda_robin_root,
    schur_matrix,
    solve_on_mesh,
    solve_with_estimate,
)
from magsteklov.torsion.solver import solve_torsion


DISK = build_domain({"family": "disk", "params": [1.0]})
SQUARE = build_domain({"family": "square", "params": [1.7724538509055159]})


class TestRoutes(TestCase):
    def test_agreement(self):
        """
        Make sure the DtN and Robin root routes agree on the same forms.
        """
        mesh = triangulate(SQUARE, 0.2)
        forms = assemble_forms(mesh, 0.7, psi=solve_torsion(mesh))

        dtn = lambda_dtn(forms)
        robin = lambda_robin_root(forms)
        self.assertAlmostEqual(robin.value / dtn.value, 1.0, delta=1e-6)
        self.assertEqual(dtn.route, "dtn")
        self.assertEqual(robin.route, "robin-root")
        self.assertLessEqual(dtn.residual, 1e-10)

    def test_schur_matrix(self):
        """
        Make sure inverse iteration finds the lowest eigenvalue of the dense
        DtN pencil.
        """
        mesh = triangulate(DISK, 0.3)
        forms = assemble_forms(mesh, 0.5, gauge="symmetric")
        S = schur_matrix(forms)
        boundary = mesh.boundary_nodes
        M_b = forms.M_boundary[boundary][:, boundary].toarray()

        values = scipy.linalg.eigh(
            0.5 * (S + S.conj().T), M_b, eigvals_only=True
        )
        self.assertAlmostEqual(
            lambda_dtn(forms).value / values[0], 1.0, delta=1e-8
        )

    def test_unknown_route(self):
        with self.assertRaises(InvalidParameters):
            solve_on_mesh(triangulate(DISK, 0.3), 0.5, route="lanczos")


class TestDisk(TestCase):
    def test_convergence(self):
        """
        Make sure the disk values converge to the closed form.
        """
        meshes = refinement_sequence(DISK, 0.2, 2)
        exact = lambda_disk(0.5, 1.0)
        errors = [
            abs(solve_on_mesh(i, 0.5).value - exact) / exact for i in meshes
        ]
        self.assertLess(errors[-1], 0.01)
        self.assertLess(errors[2], errors[1])
        self.assertLess(errors[1], errors[0])

    def test_estimate(self):
        result = solve_with_estimate(
            DISK, 0.5, MeshOptions(h=0.2, refinement_levels=1)
        )
        exact = lambda_disk(0.5, 1.0)
        self.assertTrue(np.isfinite(result.error_estimate))
        self.assertLess(result.error_estimate, 0.05 * exact)
        self.assertEqual(result.h, 0.1)


class TestInvariance(TestCase):
    def test_gauge(self):
        """
        Make sure the torsion and symmetric gauges give close values - they
        differ by a gradient, up to discretisation.
        """
        mesh = refinement_sequence(SQUARE, 0.2, 1)[-1]
        torsion = solve_on_mesh(mesh, 0.8, gauge="torsion")
        symmetric = solve_on_mesh(mesh, 0.8, gauge="symmetric")
        self.assertAlmostEqual(
            torsion.value / symmetric.value, 1.0, delta=0.03
        )

    def test_scaling(self):
        """
        Make sure lambda(b, t domain) = lambda(b t^2, domain) / t on a
        scaled mesh.
        """
        mesh = triangulate(SQUARE, 0.2)
        base = solve_on_mesh(mesh, 1.0, gauge="symmetric").value
        scaled = solve_on_mesh(mesh.scaled(2.0), 0.25, gauge="symmetric")
        self.assertAlmostEqual(scaled.value / (base / 2.0), 1.0, delta=1e-9)
