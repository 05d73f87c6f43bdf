"""
An upper bound for the exterior eigenvalue of a domain: the exterior disk
ground state, spread along the distance to the domain,
``u(x) = psi(dist(x, domain))``. By the co-area formula its quotient is::

    int psi'(t)^2 |S_t| + (b^2 / 4) psi(t)^2 M(S_t) dt  /  (L psi(0)^2)

where ``S_t`` are the outer parallel curves, ``M`` their second moment
about the origin and ``L`` the perimeter. The profile belongs to the disk
with the same perimeter.
"""
from __future__ import annotations
from dataclasses import dataclass, field
import logging
import math
import typing as t

import numpy as np

from magsteklov.exterior.profile import (
    PANEL_ORDER,
    PANELS,
    RadialProfile,
    lambda_disk_exterior,
    panel_rule,
)
from magsteklov.exterior.fibers import truncation_radius
from magsteklov.geometry.domains import Domain, domain_metrics
from magsteklov.geometry.exceptions import NotSimple
from magsteklov.geometry.offset import OffsetFunctionals, offset_functionals
from magsteklov.shared.exceptions import HypothesisViolation
from magsteklov.shared.guards import RegimeGuard, apply_regime_guard
from magsteklov.shared.tables import write_csv
from magsteklov.steklov2d.exceptions import NonPositiveMargin


logger = logging.getLogger(__file__)


GEOMETRY_TOLERANCE = 1e-9
EQUALITY_TOLERANCE = 1e-8

TRIAL_REGIME = RegimeGuard(
    regime_number=lambda domain, b, **kwargs: (
        b * domain_metrics(domain).perimeter ** 2
    ),
    limit=4.0 * math.pi**2,
    description="b * L^2",
)


@dataclass(frozen=True)
class NodeChecks:
    """
    Geometric checks at every quadrature node. Gaps are non-negative when
    the check passes.
    """

    offset: np.ndarray
    steiner_gap: np.ndarray = field(
        metadata={"help_text": "L + 2 pi t - |S_t|."}
    )
    moment_gap: np.ndarray = field(
        metadata={"help_text": "2 pi (R' + t)^3 - M(S_t)."}
    )
    hurwitz_gap: np.ndarray = field(
        metadata={"help_text": "|S_t|^3 / (4 pi^2) - M(S_t)."}
    )
    centroid_offset: np.ndarray = field(
        metadata={"help_text": "|centroid(S_t)| / (R' + t)."}
    )

    def passed(self, tolerance: float = GEOMETRY_TOLERANCE) -> bool:
        scale = 1.0 + self.offset
        return bool(
            np.all(self.steiner_gap >= -tolerance * scale)
            and np.all(self.moment_gap >= -tolerance * scale**3)
            and np.all(self.hurwitz_gap >= -tolerance * scale**3)
            and np.all(self.centroid_offset <= tolerance)
        )


@dataclass(frozen=True)
class TrialReport:
    family: str
    b: float
    perimeter: float
    gradient_integral: float = field(
        metadata={"help_text": "int psi'^2 |S_t| dt up to the truncation."}
    )
    moment_integral: float = field(
        metadata={"help_text": "(b^2 / 4) int psi^2 M(S_t) dt."}
    )
    tail: float = field(
        metadata={"help_text": "Certified bound on the numerator beyond T."}
    )
    trace_norm: float = field(metadata={"help_text": "L psi(0)^2."})
    quotient: float
    comparison: float = field(
        metadata={
            "help_text": "lambda of the perimeter matched exterior disk."
        }
    )
    margin: float
    error_estimate: float
    l2_mass: float = field(
        metadata={"help_text": "int psi^2 |S_t| dt, the trial state's mass."}
    )
    l2_mass_disk: float = math.nan
    checks_passed: bool = True
    min_steiner_gap: float = math.nan
    min_moment_gap: float = math.nan
    min_hurwitz_gap: float = math.nan
    max_centroid_offset: float = math.nan
    checks: t.Optional[NodeChecks] = field(default=None, repr=False)
    nodes: t.Optional[np.ndarray] = field(default=None, repr=False)
    functionals: t.Optional[OffsetFunctionals] = field(
        default=None, repr=False
    )
    profile: t.Optional[RadialProfile] = field(default=None, repr=False)

    def to_csv(self, path) -> None:
        """
        ``t, sigma_length, second_moment, psi, dpsi`` at every node.
        """
        write_csv(
            path,
            ("t", "sigma_length", "second_moment", "psi", "dpsi"),
            zip(
                self.nodes.tolist(),
                self.functionals.length.tolist(),
                self.functionals.second_moment.tolist(),
                np.atleast_1d(self.profile.psi(self.nodes)).tolist(),
                np.atleast_1d(self.profile.dpsi(self.nodes)).tolist(),
            ),
        )


def _check_hypotheses(domain: Domain) -> Domain:
    """
    The domain needs two axes of symmetry, or a center of symmetry, so
    that every parallel curve is centered where the domain is. It's then
    moved so that center is the origin.
    """
    metrics = domain_metrics(domain)
    if domain.family != "disk" and metrics.symmetry == "none":
        raise HypothesisViolation(
            f"The {domain.family} domain has no center of symmetry."
        )
    return domain.translated((-metrics.centroid[0], -metrics.centroid[1]))


def node_checks(
    functionals: OffsetFunctionals, perimeter: float
) -> NodeChecks:
    t_values = functionals.offset
    radius = perimeter / (2.0 * math.pi) + t_values
    length = functionals.length
    moment = functionals.second_moment
    return NodeChecks(
        offset=t_values,
        steiner_gap=perimeter + 2.0 * math.pi * t_values - length,
        moment_gap=2.0 * math.pi * radius**3 - moment,
        hurwitz_gap=length**3 / (4.0 * math.pi**2) - moment,
        centroid_offset=np.linalg.norm(functionals.centroid, axis=1) / radius,
    )


def _integrals(
    profile: RadialProfile,
    nodes: np.ndarray,
    weights: np.ndarray,
    functionals: OffsetFunctionals,
) -> t.Tuple[float, float, float]:
    psi = profile.psi(nodes)
    dpsi = profile.dpsi(nodes)
    gradient = float(np.sum(weights * dpsi**2 * functionals.length))
    moment = float(
        0.25
        * profile.b**2
        * np.sum(weights * psi**2 * functionals.second_moment)
    )
    mass = float(np.sum(weights * psi**2 * functionals.length))
    return gradient, moment, mass


@apply_regime_guard(TRIAL_REGIME)
def trial_quotient_exterior(
    domain: Domain,
    b: float,
    n_panels: int = PANELS,
    order: int = PANEL_ORDER,
    grid_fallback: bool = False,
    override: bool = False,
) -> TrialReport:
    """
    The quotient of the distance function trial state, compared with the
    exterior disk of the same perimeter.

    The t-integral uses Gauss-Legendre panels up to the truncation radius
    of the profile. Beyond it the numerator is bounded by the disk's own
    tail, which the Steiner and moment inequalities dominate, and the bound
    is added. The error estimate is the change from halving the number of
    panels, plus that tail bound.

    :raises HypothesisViolation:
        If the domain isn't symmetric, or a parallel curve isn't simple.
    :raises NonPositiveMargin:
        If the quotient exceeds the exterior disk value by more than the
        error estimate.

    """
    domain = _check_hypotheses(domain)
    perimeter = domain_metrics(domain).perimeter
    R_prime = perimeter / (2.0 * math.pi)

    comparison = lambda_disk_exterior(b, R_prime, override=True)
    profile = RadialProfile(
        b=b,
        R_prime=R_prime,
        R_out=truncation_radius(b, R_prime),
        value=comparison,
    )
    extent = profile.extent

    def evaluate(panels: int):
        nodes, weights = panel_rule(extent, panels, order)
        try:
            functionals = offset_functionals(
                domain, nodes, grid_fallback=grid_fallback
            )
        except NotSimple as exception:
            raise HypothesisViolation(str(exception)) from exception
        return nodes, functionals, _integrals(
            profile, nodes, weights, functionals
        )

    nodes, functionals, (gradient, moment, mass) = evaluate(n_panels)
    _, _, (coarse_gradient, coarse_moment, _) = evaluate(max(n_panels // 2, 1))

    tail = profile.tail(extent)
    trace_norm = perimeter * profile.trace**2
    quotient = (gradient + moment + tail) / trace_norm
    coarse = (coarse_gradient + coarse_moment + tail) / trace_norm
    error = abs(quotient - coarse) + tail / trace_norm
    margin = comparison - quotient

    checks = node_checks(functionals, perimeter)
    report = TrialReport(
        family=domain.family,
        b=b,
        perimeter=perimeter,
        gradient_integral=gradient,
        moment_integral=moment,
        tail=tail,
        trace_norm=trace_norm,
        quotient=quotient,
        comparison=comparison,
        margin=margin,
        error_estimate=error,
        l2_mass=mass,
        l2_mass_disk=profile.l2_mass(),
        checks_passed=checks.passed(),
        min_steiner_gap=float(checks.steiner_gap.min()),
        min_moment_gap=float(checks.moment_gap.min()),
        min_hurwitz_gap=float(checks.hurwitz_gap.min()),
        max_centroid_offset=float(checks.centroid_offset.max()),
        checks=checks,
        nodes=nodes,
        functionals=functionals,
        profile=profile,
    )

    if margin < -max(error, EQUALITY_TOLERANCE * comparison):
        raise NonPositiveMargin(
            f"The trial quotient {quotient!r} exceeds the exterior disk value "
            f"{comparison!r} by more than {error:.3g}."
        )
    if not report.checks_passed:
        logger.warning(
            f"Parallel curve checks failed for {domain.family}: Steiner "
            f"{report.min_steiner_gap:.3g}, moment {report.min_moment_gap:.3g}"
            f", centroid {report.max_centroid_offset:.3g}."
        )

    logger.info(
        f"Exterior trial for {domain.family} at b={b!r}: {quotient!r} vs "
        f"{comparison!r}, margin {margin:.3g} +/- {error:.3g}."
    )
    return report


def trial_l2_comparison(report: TrialReport) -> t.Tuple[float, float]:
    """
    ``(int psi^2 |S_t| dt, int psi^2 |C_t| dt)``. The first is at most the
    second by Steiner's inequality, so the trial state is square
    integrable.
    """
    return report.l2_mass, report.l2_mass_disk
