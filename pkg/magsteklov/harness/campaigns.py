"""
Verification campaigns. Each item is one domain at one field strength,
and produces a record of every member of the inequality chain with its
error estimate, and the comparisons between them.
"""
from __future__ import annotations
from concurrent.futures import ProcessPoolExecutor
import dataclasses
from dataclasses import dataclass, field
import logging
import math
import time
import typing as t

from magsteklov.aux1d.kappa import (
    TruncationStudy,
    kappa1,
    kappa_value,
    truncation_study,
)
from magsteklov.aux1d.problem import AuxOptions, AuxProblem
from magsteklov.disk.closed_form import lambda_disk
from magsteklov.exterior.trial import TrialReport, trial_quotient_exterior
from magsteklov.geometry.domains import Domain, domain_metrics
from magsteklov.harness.config import CampaignConfig, Tolerances
from magsteklov.harness.reports import (
    BoundedRecord,
    ChainMember,
    Comparison,
    ExteriorRecord,
    VerificationReport,
)
from magsteklov.meshing.triangulate import refinement_sequence
from magsteklov.shared.exceptions import ChainViolation
from magsteklov.shared.guards import RegimeGuard, apply_regime_guard
from magsteklov.shared.serializers import serialize
from magsteklov.shared.tables import write_csv
from magsteklov.steklov2d.forms import assemble_forms
from magsteklov.steklov2d.solvers import lambda_dtn
from magsteklov.steklov2d.trial import torsion_trial_quotient
from magsteklov.torsion.levels import level_statistics
from magsteklov.torsion.solver import solve_torsion
from magsteklov.torsion.weights import (
    FOUR_PI,
    ConstantWeight,
    LevelOptions,
    Weight,
    weight_function,
)


logger = logging.getLogger(__file__)


BOUNDED_REGIME = RegimeGuard(
    regime_number=lambda domain, b, **kwargs: b * domain_metrics(domain).area,
    limit=math.pi,
    description="b * |domain|",
)
EXTERIOR_REGIME = RegimeGuard(
    regime_number=lambda domain, b, **kwargs: (
        b * domain_metrics(domain).perimeter ** 2
    ),
    limit=4.0 * math.pi**2,
    description="b * L^2",
)


def _raise_violations(name: str, comparisons: t.List[Comparison]):
    violated = [i.name for i in comparisons if i.violated]
    if violated:
        raise ChainViolation(
            f"{name}: {', '.join(violated)} fail beyond their error bars."
        )


###############################################################################
# Bounded domains


@dataclass
class MeshLevel:
    """
    Everything computed on one mesh of the refinement sequence.
    """

    perimeter_lambda: float
    lam: float
    kappa: float
    kappa_route_gap: float
    # The constant weight on the mesh area, which is the a_star of ``kappa``.
    kappa_4pi: float
    trial: float
    trial_quotient: float
    weight_maximum: float
    weight: t.Any = field(repr=False)
    n_nodes: int = 0


def _solve_level(
    mesh,
    b: float,
    perimeter: float,
    aux_options: AuxOptions,
    level_options: LevelOptions,
    route_tolerance: float,
) -> MeshLevel:
    psi = solve_torsion(mesh)
    forms = assemble_forms(mesh, b, gauge="torsion", psi=psi)
    lam = lambda_dtn(forms).value

    levels = level_statistics(psi, level_options.n_levels)
    weight = weight_function(levels, level_options)
    kappa_result = kappa1(
        AuxProblem.from_options(b, weight, aux_options), route_tolerance
    )
    trial = torsion_trial_quotient(forms, psi, levels, kappa_result)
    kappa_4pi = kappa_value(
        b, ConstantWeight(a_star=weight.a_star), aux_options
    )

    return MeshLevel(
        perimeter_lambda=perimeter * lam,
        lam=lam,
        kappa=kappa_result.kappa,
        kappa_route_gap=kappa_result.route_gap,
        kappa_4pi=kappa_4pi,
        trial=trial.scaled,
        trial_quotient=trial.quotient,
        weight_maximum=weight.maximum,
        weight=weight,
        n_nodes=mesh.n_nodes,
    )


def aux_grid_error(
    b: float, weight: Weight, kappa: float, aux_options: AuxOptions
) -> float:
    """
    A bound on the discretisation error of ``kappa_1``: its distance from
    the value on a grid with half the nodes.
    """
    coarse = kappa_value(
        b,
        weight,
        dataclasses.replace(aux_options, n_a=max(aux_options.n_a // 2, 16)),
    )
    return abs(kappa - coarse)


def truncation_orders(weight_maximum: float) -> t.List[int]:
    """
    ``1, 2, ...`` up to the first ``n`` with ``4 pi n >= max G``, where the
    truncation leaves the weight unchanged.
    """
    last = max(1, math.ceil(weight_maximum / FOUR_PI))
    return list(range(1, last + 1))


@apply_regime_guard(BOUNDED_REGIME)
def verify_bounded(
    domain: Domain,
    b: float,
    h: float = 0.1,
    refinements: int = 2,
    tolerances: t.Optional[Tolerances] = None,
    aux_options: t.Optional[AuxOptions] = None,
    level_options: t.Optional[LevelOptions] = None,
    index: int = 0,
    raise_on_violation: bool = True,
    override: bool = False,
) -> t.Tuple[BoundedRecord, TruncationStudy]:
    """
    The isoperimetric chain for a bounded domain::

        |dD| lambda(b, D) <= kappa_1(b, G_D) < kappa_1(b, 4 pi)
                          = |dB| lambda(b, B)

    where ``B`` is the disk of the same area, together with the torsion
    trial quotient, ``lambda(b, D) < lambda(b, B)``, and the comparison
    with the disk ``B'`` of the same perimeter::

        lambda(b, B') = lambda(b t^2, B) / t,  t = |dD| / sqrt(4 pi |D|)

    Discrete values come from the two finest meshes, whose difference
    gives the error estimate. ``kappa_G`` is compared with the constant
    weight on the mesh area, which is its own ``a_star``. For a disk the
    strict comparisons become equalities.

    :raises ChainViolation:
        If a comparison fails beyond its error bars and
        ``raise_on_violation`` is set.

    """
    tolerances = tolerances or Tolerances()
    aux_options = aux_options or AuxOptions()
    level_options = level_options or LevelOptions()

    metrics = domain_metrics(domain)
    perimeter = metrics.perimeter
    meshes = refinement_sequence(domain, h, refinements)

    coarse, fine = (
        _solve_level(
            mesh, b, perimeter, aux_options, level_options, tolerances.route
        )
        for mesh in meshes[-2:]
    )

    def richardson(name: str) -> ChainMember:
        value = getattr(fine, name)
        return ChainMember(
            value=value, error=abs(value - getattr(coarse, name)) / 3.0
        )

    perimeter_lambda = richardson("perimeter_lambda")
    lam = richardson("lam")
    trial = richardson("trial")
    kappa_g = richardson("kappa")
    kappa_g = ChainMember(
        value=kappa_g.value,
        error=kappa_g.error
        + fine.kappa_route_gap * kappa_g.value
        + aux_grid_error(b, fine.weight, kappa_g.value, aux_options),
    )
    kappa_4pi_mesh = richardson("kappa_4pi")
    kappa_4pi_mesh = ChainMember(
        value=kappa_4pi_mesh.value,
        error=kappa_4pi_mesh.error
        + aux_grid_error(
            b,
            ConstantWeight(a_star=fine.weight.a_star),
            kappa_4pi_mesh.value,
            aux_options,
        ),
    )

    # The disk of the same area, by the 1D problem and in closed form.
    radius = math.sqrt(metrics.area / math.pi)
    disk = ChainMember(
        value=2.0 * math.pi * radius * lambda_disk(b, radius, override=True)
    )
    kappa_4pi_result = kappa1(
        AuxProblem.from_options(
            b, ConstantWeight(a_star=metrics.area), aux_options
        ),
        tolerances.route,
    )
    kappa_4pi = ChainMember(
        value=kappa_4pi_result.kappa,
        error=kappa_4pi_result.route_gap * kappa_4pi_result.kappa
        + aux_grid_error(
            b,
            ConstantWeight(a_star=metrics.area),
            kappa_4pi_result.kappa,
            aux_options,
        ),
    )

    stretch = perimeter / math.sqrt(4.0 * math.pi * metrics.area)
    lambda_b = ChainMember(value=disk.value / (2.0 * math.pi * radius))
    lambda_b_prime = ChainMember(
        value=lambda_disk(b * stretch**2, radius, override=True) / stretch
    )

    is_disk = domain.family == "disk"
    strict = "eq" if is_disk else "lt"
    ratio = tolerances.margin_ratio
    comparisons = [
        Comparison.evaluate(
            "lambda <= trial",
            "le",
            lam,
            richardson("trial_quotient"),
            ratio,
        ),
        Comparison.evaluate(
            "perimeter_lambda <= kappa_G",
            "le",
            perimeter_lambda,
            kappa_g,
            ratio,
        ),
        Comparison.evaluate(
            "kappa_G < kappa_4pi", strict, kappa_g, kappa_4pi_mesh, ratio
        ),
        Comparison.evaluate("kappa_4pi = disk", "eq", kappa_4pi, disk, ratio),
        Comparison.evaluate(
            "perimeter_lambda < disk", strict, perimeter_lambda, disk, ratio
        ),
        Comparison.evaluate("lambda < lambda_B", strict, lam, lambda_b, ratio),
        Comparison.evaluate(
            "lambda < lambda_B_prime", strict, lam, lambda_b_prime, ratio
        ),
    ]

    study = truncation_study(
        b, fine.weight, truncation_orders(fine.weight_maximum), aux_options
    )

    record = BoundedRecord(
        index=index,
        domain=domain.family,
        b=b,
        area=metrics.area,
        perimeter=perimeter,
        h=h,
        n_nodes=fine.n_nodes,
        members={
            "perimeter_lambda": perimeter_lambda,
            "lambda": lam,
            "torsion_trial": trial,
            "kappa_G": kappa_g,
            "kappa_4pi": kappa_4pi,
            "disk": disk,
            "lambda_B": lambda_b,
            "lambda_B_prime": lambda_b_prime,
        },
        comparisons=comparisons,
        truncation=study.rows(),
        truncation_monotone=study.monotone,
        passed=all(i.passed for i in comparisons),
    )
    logger.info(
        f"Bounded {domain.family} at b={b!r}: "
        f"{'pass' if record.passed else 'FAIL'}."
    )
    if raise_on_violation:
        _raise_violations(f"{domain.family} at b={b!r}", comparisons)
    return record, study


###############################################################################
# Exterior domains


@apply_regime_guard(EXTERIOR_REGIME)
def verify_exterior(
    domain: Domain,
    b: float,
    tolerances: t.Optional[Tolerances] = None,
    n_panels: int = 512,
    index: int = 0,
    raise_on_violation: bool = True,
    override: bool = False,
) -> t.Tuple[ExteriorRecord, TrialReport]:
    """
    The trial quotient of the exterior of ``domain`` against the exterior
    disk with the same perimeter. The disk itself is the equality case.

    :raises HypothesisViolation:
        If the domain isn't symmetric, or a parallel curve isn't simple.
    :raises ChainViolation:
        If the quotient exceeds the disk value beyond its error bars, and
        ``raise_on_violation`` is set.

    """
    tolerances = tolerances or Tolerances()
    report = trial_quotient_exterior(
        domain, b, n_panels=n_panels, override=True
    )

    quotient = ChainMember(value=report.quotient, error=report.error_estimate)
    comparison = ChainMember(value=report.comparison)
    kind = "eq" if domain.family == "disk" else "lt"
    comparisons = [
        Comparison.evaluate(
            "trial < exterior_disk",
            kind,
            quotient,
            comparison,
            tolerances.margin_ratio,
        ),
        Comparison.evaluate(
            "trial_l2 <= disk_l2",
            "le",
            ChainMember(value=report.l2_mass, error=1e-12 * report.l2_mass),
            ChainMember(value=report.l2_mass_disk),
            tolerances.margin_ratio,
        ),
    ]

    record = ExteriorRecord(
        index=index,
        domain=domain.family,
        b=b,
        perimeter=report.perimeter,
        members={"trial": quotient, "exterior_disk": comparison},
        comparisons=comparisons,
        trial=serialize(report),
        geometry_passed=report.checks_passed,
        passed=report.checks_passed and all(i.passed for i in comparisons),
    )
    logger.info(
        f"Exterior {domain.family} at b={b!r}: "
        f"{'pass' if record.passed else 'FAIL'}."
    )
    if raise_on_violation:
        _raise_violations(f"exterior {domain.family} at b={b!r}", comparisons)
    return record, report


###############################################################################
# Campaigns


@dataclass(frozen=True)
class CampaignItem:
    kind: str
    index: int
    domain: Domain
    b: float
    h: float = 0.1
    refinements: int = 2


def campaign_items(config: CampaignConfig) -> t.List[CampaignItem]:
    """
    Every (domain, b) pair, bounded first, numbered in config order.
    """
    items = []
    for campaign in config.bounded:
        domain = campaign.domain.build()
        for b in campaign.b:
            items.append(
                CampaignItem(
                    kind="bounded",
                    index=len(items),
                    domain=domain,
                    b=b,
                    h=campaign.h,
                    refinements=campaign.refinements,
                )
            )
    for campaign in config.exterior:
        domain = campaign.domain.build()
        for b in campaign.b:
            items.append(
                CampaignItem(
                    kind="exterior", index=len(items), domain=domain, b=b
                )
            )
    return items


def run_item(
    task: t.Tuple[CampaignItem, CampaignConfig]
) -> t.Tuple[CampaignItem, t.Any, t.Any, float]:
    """
    Run one item. Module level, so process pools can pickle it.
    """
    item, config = task
    start = time.perf_counter()
    if item.kind == "bounded":
        record, table = verify_bounded(
            item.domain,
            item.b,
            h=item.h,
            refinements=item.refinements,
            tolerances=config.tolerances,
            aux_options=AuxOptions(n_a=config.n_a),
            level_options=LevelOptions(n_levels=config.n_levels),
            index=item.index,
            raise_on_violation=False,
            override=config.override_regime,
        )
    else:
        record, table = verify_exterior(
            item.domain,
            item.b,
            tolerances=config.tolerances,
            n_panels=config.n_panels,
            index=item.index,
            raise_on_violation=False,
            override=config.override_regime,
        )
    return item, record, table, time.perf_counter() - start


@dataclass
class CampaignResult:
    report: VerificationReport
    tables: t.Dict[str, t.Callable[[str], None]] = field(default_factory=dict)


def _truncation_writer(study: TruncationStudy) -> t.Callable[[str], None]:
    return lambda path: write_csv(path, ("n", "kappa"), study.rows())


def run_campaigns(config: CampaignConfig) -> CampaignResult:
    """
    Run every item, in parallel when ``config.workers > 1``. Records keep
    the config order whatever order the workers finish in.
    """
    tasks = [(item, config) for item in campaign_items(config)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(run_item, tasks))
    else:
        outcomes = [run_item(task) for task in tasks]

    report = VerificationReport()
    tables: t.Dict[str, t.Callable[[str], None]] = {}
    for item, record, table, elapsed in outcomes:
        report.timing[f"{item.kind}_{item.index}"] = elapsed
        if item.kind == "bounded":
            report.bounded.append(record)
            tables[f"truncation_{item.index}.csv"] = _truncation_writer(table)
        else:
            report.exterior.append(record)
            tables[f"trial_{item.index}.csv"] = table.to_csv

    report.passed = all(
        i.passed for i in [*report.bounded, *report.exterior]
    )
    logger.info(
        f"{len(outcomes)} campaign items, "
        f"{'all passed' if report.passed else 'some failed'}."
    )
    return CampaignResult(report=report, tables=tables)
