from unittest import TestCase

import numpy as np
import scipy.sparse

from magsteklov.shared.eigen import (
    inverse_iteration,
    largest_generalized_eigenvalue,
)
from magsteklov.shared.exceptions import EigensolverStagnation


class TestInverseIteration(TestCase):
    def test_dense(self):
        """
        Make sure the lowest eigenpair of a dense pencil is found.
        """
        A = np.diag([3.0, 1.0, 2.0])
        M = np.eye(3)
        pair = inverse_iteration(A, M, shift=0.0, seed=np.ones(3))
        self.assertAlmostEqual(pair.value, 1.0, places=10)
        self.assertAlmostEqual(abs(pair.vector[1]), 1.0, places=8)

    def test_sparse_generalized(self):
        """
        Make sure sparse pencils with a non-identity mass work.
        """
        A = scipy.sparse.diags([2.0, 6.0, 12.0]).tocsr()
        M = scipy.sparse.diags([1.0, 2.0, 3.0]).tocsr()
        pair = inverse_iteration(A, M, shift=-1.0, seed=np.ones(3))
        self.assertAlmostEqual(pair.value, 2.0, places=10)

        vector = pair.vector
        self.assertAlmostEqual(float(vector @ (M @ vector)), 1.0)

    def test_bad_shift(self):
        """
        Make sure a shift above the spectrum is reported for dense matrices.
        """
        with self.assertRaises(EigensolverStagnation):
            inverse_iteration(
                np.diag([1.0, 2.0]), np.eye(2), shift=5.0, seed=np.ones(2)
            )

    def test_stagnation(self):
        with self.assertRaises(EigensolverStagnation):
            inverse_iteration(
                np.diag([1.0, 1.0001, 3.0]),
                np.eye(3),
                shift=0.0,
                seed=np.ones(3),
                tol=1e-14,
                maxiter=3,
            )


class TestLargestEigenvalue(TestCase):
    def test_power_iteration(self):
        value = largest_generalized_eigenvalue(
            np.diag([1.0, 2.0, 3.0]), np.eye(3)
        )
        self.assertAlmostEqual(value, 3.0, places=8)
