from __future__ import annotations
from dataclasses import dataclass, field
from functools import cached_property
import math
import typing as t

import numpy as np

from magsteklov.aux1d.exceptions import NonPositiveForm
from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.shared.radial import (
    RadialForm,
    assemble_radial_form,
    gauss_points,
    graded_grid,
)
from magsteklov.torsion.weights import FOUR_PI, Weight


@dataclass
class AuxOptions:
    """
    :param n_a:
        Grid nodes on ``[0, a_star]``.
    :param grading_ratio:
        Geometric growth of the cells away from ``a = 0``, where the
        stiffness weight ``a G`` vanishes.

    """

    n_a: int = 2000
    grading_ratio: float = 1.05


@dataclass(frozen=True, eq=False)
class AuxProblem:
    """
    The one dimensional problem on ``(0, a_star)`` with the form::

        int a G |f'|^2 + (b^2 a / G) |f|^2 da

    and the boundary value ``|f(a_star)|^2`` in the denominator. Nothing is
    imposed at ``a = 0``.
    """

    b: float
    weight: Weight
    a_star: float
    n_a: int = 2000
    grading_ratio: float = 1.05

    def __post_init__(self):
        if not self.b > 0:
            raise NonPositiveForm(
                f"b = {self.b!r} - the form is only positive definite for "
                "b > 0."
            )
        if not self.a_star > 0:
            raise InvalidParameters("a_star must be positive.")

        lowest = float(np.min(self.weight(self.nodes)))
        if lowest < FOUR_PI * (1.0 - 1e-12):
            raise InvalidParameters(
                f"The weight drops to {lowest!r}, below 4 pi."
            )

    @classmethod
    def from_options(
        cls,
        b: float,
        weight: Weight,
        options: t.Optional[AuxOptions] = None,
        a_star: t.Optional[float] = None,
    ) -> AuxProblem:
        options = options or AuxOptions()
        return cls(
            b=b,
            weight=weight,
            a_star=weight.a_star if a_star is None else a_star,
            n_a=options.n_a,
            grading_ratio=options.grading_ratio,
        )

    @cached_property
    def nodes(self) -> np.ndarray:
        return graded_grid(self.a_star, self.n_a, self.grading_ratio)

    @cached_property
    def form(self) -> RadialForm:
        points, _ = gauss_points(self.nodes)
        weight = self.weight(points)
        return assemble_radial_form(
            self.nodes,
            stiffness=points * weight,
            potential=self.b**2 * points / weight,
            weight=np.ones_like(points),
        )


@dataclass(frozen=True)
class Kappa1Result:
    kappa: float
    nodes: np.ndarray = field(repr=False)
    f: np.ndarray = field(
        repr=False, metadata={"help_text": "Minimiser with f(a_star) = 1."}
    )
    X: np.ndarray = field(repr=False)
    Y: np.ndarray = field(
        repr=False, metadata={"help_text": "Flux a G f' on the nodes."}
    )
    R: np.ndarray = field(repr=False)
    route: str = "schur"
    kappa_robin: float = math.nan
    route_gap: float = math.nan
    residual: float = math.nan
    evaluations: int = 0
