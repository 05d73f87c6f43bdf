from __future__ import annotations
from dataclasses import dataclass, field, replace
import logging
import math
import typing as t

import numpy as np
import scipy.sparse
import scipy.sparse.linalg
from scipy.optimize import brentq

from magsteklov.geometry.domains import Domain
from magsteklov.meshing.mesh import Mesh
from magsteklov.meshing.triangulate import MeshOptions, refinement_sequence
from magsteklov.shared.eigen import (
    Eigenpair,
    inverse_iteration,
    largest_generalized_eigenvalue,
)
from magsteklov.shared.exceptions import (
    BracketFailure,
    EigensolverStagnation,
    InvalidParameters,
)
from magsteklov.steklov2d.exceptions import InteriorSolveFailure
from magsteklov.steklov2d.forms import FormSet, assemble_forms
from magsteklov.torsion.solver import solve_torsion


logger = logging.getLogger(__file__)


TOLERANCE = 1e-10
MAX_ITERATIONS = 1000
SHIFT_SAFETY = 1.25
BRACKET_SAFETY = 1.05
MIN_TRACE_RATIO = 1e-8

ROUTES = ("dtn", "robin-root")


@dataclass(frozen=True)
class SpectralResult:
    value: float = field(metadata={"help_text": "lambda(b, domain)."})
    vector: np.ndarray = field(
        repr=False, metadata={"help_text": "Complex nodal eigenfunction."}
    )
    route: str = "dtn"
    h: float = math.nan
    error_estimate: float = field(
        default=math.nan,
        metadata={"help_text": "Richardson estimate |fine - coarse| / 3."},
    )
    b: float = math.nan
    gauge: str = "torsion"
    iterations: int = 0
    residual: float = math.nan
    n_nodes: int = 0


def _check_trace(fs: FormSet, vector: np.ndarray):
    trace = np.sqrt(abs(np.vdot(vector, fs.M_boundary @ vector)))
    total = np.sqrt(abs(np.vdot(vector, fs.M @ vector))) + trace
    if trace < MIN_TRACE_RATIO * total:
        raise EigensolverStagnation(
            "The eigenfunction has a vanishing boundary trace."
        )


def _factorize(matrix) -> scipy.sparse.linalg.SuperLU:
    try:
        return scipy.sparse.linalg.splu(scipy.sparse.csc_matrix(matrix))
    except RuntimeError as exception:
        raise InteriorSolveFailure(
            f"The magnetic stiffness is singular: {exception}"
        ) from exception


###############################################################################
# Dirichlet-to-Neumann route


def schur_matrix(fs: FormSet) -> np.ndarray:
    """
    The dense discrete DtN matrix ``K_GG - K_GI K_II^-1 K_IG`` on the
    boundary nodes. Only sensible for small meshes.
    """
    boundary = fs.mesh.boundary_nodes
    interior = fs.mesh.interior_nodes
    K = fs.K.tocsr()
    K_II = K[interior][:, interior]
    K_IG = K[interior][:, boundary].toarray()
    K_GI = K[boundary][:, interior]
    K_GG = K[boundary][:, boundary].toarray()
    solution = _factorize(K_II).solve(K_IG)
    return K_GG - K_GI @ solution


def lambda_dtn(
    fs: FormSet, tol: float = TOLERANCE, maxiter: int = MAX_ITERATIONS
) -> SpectralResult:
    """
    Lowest eigenvalue of the pencil ``(S, M_b)`` where ``S`` is the Schur
    complement of the interior block of ``K``.

    ``S^-1`` is the boundary block of ``K^-1``, so every inverse iteration
    step is one solve with the factorised ``K``: solving
    ``K w = (M_b x, 0)`` gives ``y = w`` on the boundary together with its
    discrete harmonic extension, and ``S y = M_b x``. The shift is 0, which
    is below the spectrum as ``S`` is positive definite.
    """
    mesh = fs.mesh
    boundary = mesh.boundary_nodes
    M_b = fs.M_boundary[boundary][:, boundary]
    lu = _factorize(fs.K)

    n = mesh.n_nodes
    x = np.ones(boundary.shape[0], dtype=complex)
    x /= np.sqrt(abs(np.vdot(x, M_b @ x)))

    value = math.inf
    residual = math.inf
    for iteration in range(1, maxiter + 1):
        rhs = np.zeros(n, dtype=complex)
        rhs[boundary] = M_b @ x
        extension = lu.solve(rhs)
        y = extension[boundary]

        My = M_b @ y
        norm = np.sqrt(abs(np.vdot(y, My)))
        value = float(np.vdot(y, rhs[boundary]).real) / norm**2
        residual = float(
            np.linalg.norm(rhs[boundary] - value * My)
            / (abs(value) * np.linalg.norm(My))
        )
        x = y / norm
        if residual <= tol:
            break
    else:
        raise EigensolverStagnation(
            f"DtN inverse iteration stalled at {value!r} (residual "
            f"{residual:.3e})."
        )

    if value <= 0.0:
        raise InteriorSolveFailure(
            f"The DtN eigenvalue {value!r} isn't positive."
        )

    vector = extension / norm
    _check_trace(fs, vector)
    logger.info(
        f"lambda_dtn: {value!r} after {iteration} iterations "
        f"(b={fs.b!r}, {fs.gauge} gauge, {n} nodes)."
    )
    return SpectralResult(
        value=value,
        vector=vector,
        route="dtn",
        h=mesh.h,
        b=fs.b,
        gauge=fs.gauge,
        iterations=iteration,
        residual=residual,
        n_nodes=n,
    )


###############################################################################
# Robin route


class RobinPencil:
    """
    ``mu(beta)``: the lowest eigenvalue of ``(K + beta M_b, M)``.

    The shift ``SHIFT_SAFETY * beta * max(M_b, M)`` lies below ``mu(beta)``
    for ``beta < 0``, because ``K`` is positive. The last eigenvector seeds
    the next solve.
    """

    def __init__(self, fs: FormSet, tol: float = TOLERANCE):
        self.fs = fs
        self.tol = tol
        self.boundary_scale = largest_generalized_eigenvalue(
            fs.M_boundary, fs.M
        )
        self.seed = np.ones(fs.mesh.n_nodes, dtype=complex)
        self.evaluations = 0
        self.last: t.Optional[Eigenpair] = None

    def eigenpair(self, beta: float) -> Eigenpair:
        fs = self.fs
        shift = SHIFT_SAFETY * min(beta, 0.0) * self.boundary_scale
        pair = inverse_iteration(
            (fs.K + beta * fs.M_boundary).tocsc(),
            fs.M,
            shift=shift,
            seed=self.seed,
            tol=self.tol,
            maxiter=MAX_ITERATIONS,
        )
        self.seed = pair.vector
        self.evaluations += 1
        self.last = pair
        return pair

    def __call__(self, beta: float) -> float:
        return self.eigenpair(beta).value


def lambda_robin_root(
    fs: FormSet, tol: float = TOLERANCE
) -> SpectralResult:
    """
    ``-beta_star`` where ``mu(beta_star) = 0``.

    The bracket is ``[lower, 0]``: ``mu(0) > 0`` since ``K`` is positive
    definite, and the constant function makes ``mu`` negative below
    ``-(1^H K 1) / (1^H M_b 1)``.

    :raises BracketFailure:
        If the bracket doesn't contain a sign change.

    """
    pencil = RobinPencil(fs, tol)

    ones = np.ones(fs.mesh.n_nodes)
    constant = float(np.vdot(ones, fs.K @ ones).real) / float(
        ones @ (fs.M_boundary @ ones)
    )
    lower = -BRACKET_SAFETY * constant
    upper = 0.0

    mu_upper = pencil(upper)
    mu_lower = pencil(lower)
    if not (mu_upper > 0.0 > mu_lower):
        raise BracketFailure(
            f"mu({upper!r}) = {mu_upper!r}, mu({lower!r}) = {mu_lower!r}."
        )

    root = brentq(
        pencil,
        lower,
        upper,
        xtol=1e-14 * abs(lower),
        rtol=4 * np.finfo(float).eps,
        maxiter=200,
    )
    pair = pencil.eigenpair(root)
    value = -root

    _check_trace(fs, pair.vector)
    logger.info(
        f"lambda_robin_root: {value!r} after {pencil.evaluations} "
        f"eigen-solves (b={fs.b!r}, {fs.gauge} gauge)."
    )
    return SpectralResult(
        value=value,
        vector=pair.vector,
        route="robin-root",
        h=fs.mesh.h,
        b=fs.b,
        gauge=fs.gauge,
        iterations=pencil.evaluations,
        residual=pair.residual,
        n_nodes=fs.mesh.n_nodes,
    )


###############################################################################


def solve_on_mesh(
    mesh: Mesh, b: float, gauge: str = "torsion", route: str = "dtn"
) -> SpectralResult:
    if route not in ROUTES:
        raise InvalidParameters(f"Unknown route {route!r}.")
    psi = solve_torsion(mesh) if gauge == "torsion" else None
    forms = assemble_forms(mesh, b, gauge=gauge, psi=psi)
    return lambda_dtn(forms) if route == "dtn" else lambda_robin_root(forms)


def solve_with_estimate(
    domain: Domain,
    b: float,
    mesh_options: t.Optional[MeshOptions] = None,
    gauge: str = "torsion",
    route: str = "dtn",
) -> SpectralResult:
    """
    Solve on the two finest meshes of a refinement sequence and attach the
    Richardson estimate ``|fine - coarse| / (2^2 - 1)`` to the fine result.
    """
    mesh_options = mesh_options or MeshOptions()
    levels = max(mesh_options.refinement_levels, 1)
    meshes = refinement_sequence(domain, mesh_options.h, levels)

    coarse = solve_on_mesh(meshes[-2], b, gauge, route)
    fine = solve_on_mesh(meshes[-1], b, gauge, route)
    return replace(fine, error_estimate=abs(fine.value - coarse.value) / 3.0)
