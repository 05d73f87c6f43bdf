"""
Lowest eigenpairs of Hermitian pencils ``(A, M)`` with ``M`` positive
definite.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging
import typing as t

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from magsteklov.shared.exceptions import EigensolverStagnation


logger = logging.getLogger(__file__)


@dataclass(frozen=True)
class Eigenpair:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float


def _operator_norm(A) -> float:
    if scipy.sparse.issparse(A):
        return float(abs(A).sum(axis=1).max())
    return float(np.abs(A).sum(axis=1).max())


def _factorize(matrix) -> t.Callable[[np.ndarray], np.ndarray]:
    if scipy.sparse.issparse(matrix):
        lu = scipy.sparse.linalg.splu(scipy.sparse.csc_matrix(matrix))
        return lu.solve

    try:
        factor = scipy.linalg.cho_factor(matrix)
    except np.linalg.LinAlgError as exception:
        raise EigensolverStagnation(
            "The shifted matrix isn't positive definite - the shift isn't "
            "below the spectrum."
        ) from exception
    return lambda rhs: scipy.linalg.cho_solve(factor, rhs)


def inverse_iteration(
    A,
    M,
    shift: float,
    seed: np.ndarray,
    tol: float = 1e-10,
    maxiter: int = 5000,
) -> Eigenpair:
    """
    Lowest eigenpair of the Hermitian pencil ``(A, M)`` by shifted inverse
    iteration.

    :param A:
        Hermitian matrix, dense or sparse.
    :param M:
        Positive definite matrix of the same shape.
    :param shift:
        Must lie below the lowest eigenvalue, so the iteration converges to
        it rather than to the eigenvalue nearest the shift.
    :param seed:
        Starting vector.
    :param tol:
        Residual tolerance, relative to the operator norm of ``A``.
    :returns:
        The eigenpair, with the vector normalised in the ``M`` inner product.

    """
    solve = _factorize(A - shift * M)
    scale = max(_operator_norm(A), _operator_norm(M) * abs(shift), 1e-300)

    x = np.asarray(seed, dtype=np.result_type(A.dtype, seed.dtype, float))
    x = x / np.sqrt(abs(np.vdot(x, M @ x)))

    value = np.inf
    residual = np.inf
    for iteration in range(1, maxiter + 1):
        y = solve(M @ x)
        x = y / np.sqrt(abs(np.vdot(y, M @ y)))

        Ax = A @ x
        Mx = M @ x
        value = float(np.vdot(x, Ax).real)
        residual = float(
            np.linalg.norm(Ax - value * Mx)
            / (scale * max(np.linalg.norm(x), 1e-300))
        )
        logger.debug(
            f"Inverse iteration {iteration}: value={value!r}, "
            f"residual={residual:.3e}"
        )
        if residual <= tol:
            return Eigenpair(
                value=value, vector=x, iterations=iteration, residual=residual
            )

    raise EigensolverStagnation(
        f"No convergence after {maxiter} iterations (value={value!r}, "
        f"residual={residual:.3e})."
    )


def largest_generalized_eigenvalue(
    B, M, iterations: int = 60, seed: t.Optional[np.ndarray] = None
) -> float:
    """
    Estimate the largest eigenvalue of the pencil ``(B, M)`` for positive
    semidefinite ``B`` by power iteration on ``M^-1 B``.
    """
    solve = _factorize(M)
    n = M.shape[0]
    x = np.ones(n) if seed is None else np.asarray(seed, dtype=float)
    value = 0.0
    for _ in range(iterations):
        y = solve(B @ x)
        norm = np.sqrt(abs(np.vdot(y, M @ y)))
        if norm == 0.0:
            return 0.0
        x = y / norm
        value = float(np.vdot(x, B @ x).real)
    return value
