"""
Separation of variables on the disk: the angular mode ``n`` leaves the
radial problem::

    int (|f'|^2 + v_n(r) |f|^2) r dr  /  (R |f(R)|^2),
    v_n(r) = (n / r - b r / 2)^2
"""
from __future__ import annotations
from dataclasses import dataclass, field
from functools import cached_property
import logging
import math
import typing as t

import numpy as np

from magsteklov.disk.exceptions import GridTooCoarse
from magsteklov.shared.exceptions import InvalidParameters, RouteMismatch
from magsteklov.shared.radial import (
    RadialForm,
    assemble_radial_form,
    gauss_points,
    graded_grid,
    robin_eigenpair,
    robin_root,
    steklov_value,
)


logger = logging.getLogger(__file__)


ROUTE_FAILURE = 1e-6


@dataclass
class RadialOptions:
    n_nodes: int = 4000
    grading_ratio: float = 1.05


@dataclass(frozen=True, eq=False)
class FiberProblem:
    n: int
    b: float
    R: float = 1.0
    n_nodes: int = 4000
    grading_ratio: float = 1.05

    def __post_init__(self):
        if not self.b > 0 or not self.R > 0:
            raise InvalidParameters("b and R must be positive.")

    @classmethod
    def from_options(
        cls, n: int, b: float, R: float, options: t.Optional[RadialOptions]
    ) -> FiberProblem:
        options = options or RadialOptions()
        return cls(
            n=n,
            b=b,
            R=R,
            n_nodes=options.n_nodes,
            grading_ratio=options.grading_ratio,
        )

    def potential(self, r: np.ndarray) -> np.ndarray:
        return (self.n / r - 0.5 * self.b * r) ** 2

    @cached_property
    def nodes(self) -> np.ndarray:
        # The centrifugal term needs resolving near r = 0.
        ratio = self.grading_ratio if self.n != 0 else None
        return graded_grid(self.R, self.n_nodes, ratio)

    @cached_property
    def form(self) -> RadialForm:
        points, _ = gauss_points(self.nodes)
        return assemble_radial_form(
            self.nodes,
            stiffness=points,
            potential=points * self.potential(points),
            weight=points,
            boundary_weight=self.R,
            dirichlet_left=self.n != 0,
        )

    def trial_guess(self) -> float:
        """
        A bound on the fiber value from the trial function ``r^|n|``,
        slightly inflated.
        """
        trial = self.nodes[self.form.free] ** abs(self.n)
        return 1.05 * self.form.quadratic(trial) / (self.R * trial[-1] ** 2)


@dataclass(frozen=True)
class FiberResult:
    n: int
    b: float
    R: float
    value: float
    value_schur: float
    route_gap: float
    evaluations: int
    profile: np.ndarray = field(repr=False)


def mu_1d(beta: float, b: float, R: float = 1.0, n: int = 0, options=None):
    """
    Lowest eigenvalue of the radial Robin problem
    ``form(f) + beta R |f(R)|^2`` against ``int |f|^2 r dr``.
    """
    problem = FiberProblem.from_options(n, b, R, options)
    return robin_eigenpair(problem.form, beta).value


def fiber_solve(
    n: int,
    b: float,
    R: float = 1.0,
    options: t.Optional[RadialOptions] = None,
    route_tolerance: float = ROUTE_FAILURE,
) -> FiberResult:
    """
    The lowest Steklov value of fiber ``n``: ``-beta_star`` where the Robin
    eigenvalue crosses zero, checked against the rank one Schur value.

    :raises BracketFailure:
        If no sign change is found.
    :raises RouteMismatch:
        If the two routes disagree by more than ``route_tolerance``.

    """
    problem = FiberProblem.from_options(n, b, R, options)
    form = problem.form

    root, evaluations = robin_root(form, problem.trial_guess())
    value = -root
    value_schur, profile = steklov_value(form)

    gap = abs(value - value_schur) / abs(value_schur)
    if gap > route_tolerance:
        raise RouteMismatch(
            f"Fiber {n} at b={b!r}: Robin {value!r}, Schur {value_schur!r}."
        )

    logger.debug(f"Fiber n={n}, b={b!r}, R={R!r}: {value!r}")
    return FiberResult(
        n=n,
        b=b,
        R=R,
        value=value,
        value_schur=value_schur,
        route_gap=gap,
        evaluations=evaluations,
        profile=form.expand(profile),
    )


def fiber_lambda(
    n: int,
    b: float,
    R: float = 1.0,
    options: t.Optional[RadialOptions] = None,
) -> float:
    return fiber_solve(n, b, R, options).value


###############################################################################


@dataclass(frozen=True)
class BStarReport:
    b: t.Tuple[float, ...]
    n_max: int
    rows: t.Tuple[t.Tuple[float, int, float], ...] = field(
        metadata={"help_text": "(b, n, lambda_fiber) for every solve."}
    )
    radial: t.Tuple[bool, ...] = ()
    crossings: t.Tuple[t.Tuple[float, float], ...] = ()
    lower: float = math.nan
    upper: t.Optional[float] = None
    tail_margin: float = math.nan

    @property
    def bracket(self) -> t.Tuple[float, t.Optional[float]]:
        """
        ``(last radial b, first non-radial b)``. The second entry is None
        when every scanned field strength had a radial minimiser.
        """
        return self.lower, self.upper


def default_n_max(b_grid: t.Sequence[float], R: float = 1.0) -> int:
    return math.ceil(max(b_grid) * R * R) + 5


def fiber_scan(
    b_grid: t.Sequence[float],
    fiber: t.Callable[[int, float], float],
    n_max: int,
    tolerance: float,
    resolution: t.Optional[float] = None,
) -> BStarReport:
    """
    Fiber minima over ``|n| <= n_max`` along the grid. Shared by the disk
    and the exterior disk scans.
    """
    b_values = [float(i) for i in b_grid]
    if any(i >= j for i, j in zip(b_values, b_values[1:])):
        raise InvalidParameters("The b grid must be increasing.")

    rows = []
    radial = []
    tail_margin = math.inf
    for b in b_values:
        values = {n: fiber(n, b) for n in range(-n_max, n_max + 1)}
        rows.extend((b, n, values[n]) for n in sorted(values))

        best_other = min(v for n, v in values.items() if n != 0)
        radial.append(not best_other < values[0] * (1.0 - tolerance))

        tail_margin = min(
            tail_margin,
            values[n_max] - values[n_max - 1],
            values[-n_max] - values[-n_max + 1],
        )

    crossings = []
    for i in range(1, len(b_values)):
        if radial[i - 1] != radial[i]:
            crossings.append((b_values[i - 1], b_values[i]))

    lower = math.nan
    upper = None
    if radial[0]:
        first_change = next(
            (i for i in range(len(radial)) if not radial[i]), None
        )
        if first_change is None:
            lower = b_values[-1]
        else:
            lower, upper = b_values[first_change - 1], b_values[first_change]
            if resolution is not None and upper - lower > resolution:
                raise GridTooCoarse(
                    f"The crossing is bracketed by [{lower}, {upper}], wider "
                    f"than {resolution}."
                )

    if tail_margin <= 0.0:
        logger.warning(
            f"The fiber values aren't increasing at |n| = {n_max} - the scan "
            "may miss modes beyond it."
        )

    return BStarReport(
        b=tuple(b_values),
        n_max=n_max,
        rows=tuple(rows),
        radial=tuple(radial),
        crossings=tuple(crossings),
        lower=lower,
        upper=upper,
        tail_margin=tail_margin,
    )


def estimate_b_star(
    b_grid: t.Sequence[float],
    n_max: t.Optional[int] = None,
    R: float = 1.0,
    options: t.Optional[RadialOptions] = None,
    resolution: t.Optional[float] = None,
) -> BStarReport:
    """
    Scan the disk fibers to bracket the field strength where the ground
    state stops being radial. Every change between radial and non-radial
    minimisers is reported, not just the first.
    """
    required = default_n_max(b_grid, R)
    if n_max is None:
        n_max = required
    elif n_max < required:
        raise InvalidParameters(
            f"n_max must be at least ceil(max(b) R^2) + 5 = {required}."
        )

    report = fiber_scan(
        b_grid,
        lambda n, b: fiber_lambda(n, b, R, options),
        n_max=n_max,
        tolerance=ROUTE_FAILURE,
        resolution=resolution,
    )
    logger.info(
        f"b_star scan over {len(report.b)} field strengths: bracket "
        f"{report.bracket}, crossings {report.crossings}."
    )
    return report
