"""
The command line commands. Each one is a plain function - ``targ`` builds
the argument parser from its signature and docstring. List arguments are
comma separated strings, such as ``--b=0.3,0.7``.
"""
from __future__ import annotations
import functools
import json
import logging
import math
import os
import sys
import typing as t

import pydantic

from magsteklov.aux1d.kappa import kappa1
from magsteklov.aux1d.problem import AuxOptions, AuxProblem
from magsteklov.disk.closed_form import disk_ground_state, lambda_disk_curve
from magsteklov.disk.fibers import RadialOptions, estimate_b_star, fiber_solve
from magsteklov.exterior.fibers import estimate_b_circ
from magsteklov.exterior.profile import exterior_disk as exterior_disk_result
from magsteklov.exterior.profile import radial_profile_exterior
from magsteklov.exterior.trial import trial_quotient_exterior
from magsteklov.geometry.domains import Domain
from magsteklov.harness.campaigns import run_campaigns
from magsteklov.harness.campaigns import verify_bounded as verify_bounded_item
from magsteklov.harness.campaigns import (
    verify_exterior as verify_exterior_item,
)
from magsteklov.harness.config import (
    DEFAULT_CAMPAIGN,
    DomainSpec,
    Tolerances,
    load_config,
)
from magsteklov.harness.reports import VerificationReport, write_reports
from magsteklov.meshing.dump import dump_mesh
from magsteklov.meshing.triangulate import refinement_sequence
from magsteklov.shared.exceptions import (
    ConfigParseError,
    InvalidParameters,
    SteklovError,
)
from magsteklov.shared.serializers import serialize
from magsteklov.shared.tables import write_csv
from magsteklov.specfun.bessel import evaluate
from magsteklov.steklov2d.solvers import solve_on_mesh
from magsteklov.torsion.levels import level_statistics
from magsteklov.torsion.solver import solve_torsion
from magsteklov.torsion.weights import ConstantWeight, LevelOptions
from magsteklov.torsion.weights import weight_function


logger = logging.getLogger(__file__)


EXIT_FAILURE = 1
EXIT_ERROR = 2


def exits_on_error(function):
    """
    Turn a ``SteklovError`` into a logged message and a non-zero exit code.
    """

    @functools.wraps(function)
    def inner_function(*args, **kwargs):
        if kwargs.get("verbose"):
            logging.getLogger().setLevel(logging.DEBUG)
        try:
            return function(*args, **kwargs)
        except SteklovError as exception:
            logger.error(f"{exception.__class__.__name__}: {exception}")
            sys.exit(EXIT_ERROR)

    return inner_function


###############################################################################
# Argument parsing


def parse_floats(text: str) -> t.List[float]:
    try:
        return [float(i) for i in str(text).split(",") if i.strip()]
    except ValueError as exception:
        raise InvalidParameters(
            f"Expected comma separated numbers, got {text!r}."
        ) from exception


def parse_domain(text: str) -> Domain:
    """
    A domain, given either as inline JSON or as the path of a JSON file::

        --domain='{"family": "ellipse", "params": {"a": 1.2, "b": 0.8}}'

    """
    try:
        if os.path.exists(text):
            with open(text) as f:
                contents = json.load(f)
        else:
            contents = json.loads(text)
        spec = DomainSpec.model_validate(contents)
    except (OSError, json.JSONDecodeError, pydantic.ValidationError) as e:
        raise ConfigParseError(f"Invalid domain {text!r}: {e}") from e
    return spec.build()


def _tolerances(tol_route: float, margin_ratio: float) -> Tolerances:
    return Tolerances(route=tol_route, margin_ratio=margin_ratio)


def _output(record: t.Any, out: str = "", name: str = "") -> None:
    text = json.dumps(record, indent=2, default=str)
    print(text)
    if out and name:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, name), "w") as f:
            f.write(text)


###############################################################################
# Commands


@exits_on_error
def disk(
    b: float,
    R: float = 1.0,
    curve: str = "",
    out: str = "",
    override_regime: bool = False,
):
    """
    The lowest eigenvalue of the disk, in closed form.

    :param b:
        The field strength.
    :param R:
        The radius.
    :param curve:
        Comma separated field strengths - writes lambda_disk along them to
        ``lambda_disk.csv`` in ``out``.
    :param out:
        Output directory.
    :param override_regime:
        Allow b R^2 > 1, where the radial ground state isn't guaranteed.

    """
    result = disk_ground_state(b, R, override=override_regime)
    _output(serialize(result, b=b, R=R))
    if curve:
        lambda_disk_curve(
            parse_floats(curve),
            R,
            path=os.path.join(out or ".", "lambda_disk.csv"),
            override=override_regime,
        )


@exits_on_error
def fiber(
    n: int,
    b: float,
    R: float = 1.0,
    n_nodes: int = 4000,
    tol_route: float = 1e-6,
):
    """
    The Steklov value of one angular mode of the disk, by the Robin root and
    the Schur routes.

    :param n:
        The angular mode.
    :param b:
        The field strength.
    :param R:
        The radius.
    :param n_nodes:
        Radial grid nodes.

    """
    result = fiber_solve(
        n, b, R, RadialOptions(n_nodes=n_nodes), route_tolerance=tol_route
    )
    _output(serialize(result))


@exits_on_error
def bstar(b: str, n_max: int = 0, R: float = 1.0, out: str = ""):
    """
    Bracket the field strength where the disk ground state stops being
    radial.

    :param b:
        Comma separated, increasing field strengths.
    :param n_max:
        Largest |n| scanned - by default ceil(max(b) R^2) + 5.

    """
    report = estimate_b_star(parse_floats(b), n_max or None, R)
    if out:
        os.makedirs(out, exist_ok=True)
        write_csv(
            os.path.join(out, "bstar_fibers.csv"),
            ("b", "n", "lambda"),
            report.rows,
        )
    _output(serialize(report))


@exits_on_error
def torsion(
    domain: str,
    h: float = 0.1,
    refinements: int = 0,
    n_levels: int = 200,
    out: str = "",
):
    """
    Solve the torsion problem, and tabulate its level sets and the weight
    G(a).

    :param domain:
        Inline JSON, or the path of a JSON file.
    :param h:
        Target mesh size.
    :param refinements:
        Uniform refinements of the initial mesh.
    :param out:
        Writes ``mesh.txt``, ``levels.csv`` and ``weight.csv`` here.

    """
    mesh = refinement_sequence(parse_domain(domain), h, refinements)[-1]
    psi = solve_torsion(mesh)
    levels = level_statistics(psi, n_levels)
    weight = weight_function(levels, LevelOptions(n_levels=n_levels))

    if out:
        os.makedirs(out, exist_ok=True)
        dump_mesh(mesh, os.path.join(out, "mesh.txt"), values=psi.values)
        levels.to_csv(os.path.join(out, "levels.csv"))
        weight.to_csv(os.path.join(out, "weight.csv"))

    _output(
        {
            "n_nodes": mesh.n_nodes,
            "max_psi": psi.maximum,
            "area": levels.area,
            "t_star": levels.t_star,
            "weight_min": weight.minimum,
            "weight_max": weight.maximum,
        }
    )


@exits_on_error
def kappa(
    b: float,
    domain: str = "",
    G: float = 4.0 * math.pi,
    a_star: float = math.pi,
    h: float = 0.1,
    n_a: int = 2000,
    tol_route: float = 1e-6,
):
    """
    kappa_1 of the auxiliary problem, either for a constant weight or for
    the torsion weight of a domain.

    :param b:
        The field strength.
    :param domain:
        If given, the weight comes from this domain's torsion function.
    :param G:
        The constant weight, at least 4 pi.
    :param a_star:
        The length of the interval, for a constant weight.

    """
    options = AuxOptions(n_a=n_a)
    if domain:
        mesh = refinement_sequence(parse_domain(domain), h, 1)[-1]
        weight = weight_function(level_statistics(solve_torsion(mesh)))
    else:
        weight = ConstantWeight(a_star=a_star, value=G)

    result = kappa1(AuxProblem.from_options(b, weight, options), tol_route)
    _output(serialize(result))


@exits_on_error
def steklov(
    domain: str,
    b: float,
    h: float = 0.1,
    refinements: int = 0,
    gauge: str = "torsion",
    route: str = "dtn",
    out: str = "",
):
    """
    The lowest magnetic Steklov eigenvalue of a domain, by finite elements.

    :param gauge:
        ``torsion`` or ``symmetric``.
    :param route:
        ``dtn`` or ``robin-root``.
    :param out:
        Writes the mesh and the eigenfunction to ``eigenfunction.txt`` here.

    """
    mesh = refinement_sequence(parse_domain(domain), h, refinements)[-1]
    result = solve_on_mesh(mesh, b, gauge, route)
    if out:
        os.makedirs(out, exist_ok=True)
        dump_mesh(
            mesh, os.path.join(out, "eigenfunction.txt"), values=result.vector
        )
    _output(serialize(result))


@exits_on_error
def exterior_disk(
    b: float,
    R_prime: float = 1.0,
    n_points: int = 2001,
    out: str = "",
    override_regime: bool = False,
):
    """
    The lowest eigenvalue of the exterior of a disk, by the K-ratio and by
    shooting.

    :param R_prime:
        The radius of the disk.
    :param out:
        Writes the radial profile to ``profile.csv`` here.

    """
    result = exterior_disk_result(b, R_prime, override=override_regime)
    if out:
        profile = radial_profile_exterior(
            b, R_prime, n_points, override=override_regime
        )
        os.makedirs(out, exist_ok=True)
        write_csv(
            os.path.join(out, "profile.csv"),
            ("t", "psi", "dpsi"),
            zip(
                profile.t.tolist(),
                profile.values.tolist(),
                profile.derivatives.tolist(),
            ),
        )
    _output(serialize(result))


@exits_on_error
def trial(
    domain: str,
    b: float,
    n_panels: int = 512,
    out: str = "",
    override_regime: bool = False,
):
    """
    The distance function trial quotient for the exterior of a domain,
    against the exterior disk of the same perimeter.

    :param out:
        Writes the per node table to ``trial.csv`` here.

    """
    report = trial_quotient_exterior(
        parse_domain(domain), b, n_panels=n_panels, override=override_regime
    )
    if out:
        os.makedirs(out, exist_ok=True)
        report.to_csv(os.path.join(out, "trial.csv"))
    _output(serialize(report))


@exits_on_error
def bstar_exterior(b: str, n_max: int = 0, R_prime: float = 1.0):
    """
    Bracket the field strength where the radial mode stops being the
    lowest exterior fiber. Experimental.

    :param b:
        Comma separated, increasing field strengths.

    """
    report = estimate_b_circ(parse_floats(b), n_max or None, R_prime)
    _output(serialize(report))


@exits_on_error
def bessel(kind: str, order: int, x: float):
    """
    A single modified Bessel function value.

    :param kind:
        ``I`` or ``K``.
    :param order:
        0 or 1.

    """
    _output(serialize(evaluate(kind, order, x)))


def _finish(report: VerificationReport, out: str, tables=None):
    if out:
        write_reports(report, out, tables)
    print(report.model_dump_json(indent=2, by_alias=True))
    if not report.passed:
        logger.error(f"Failed: {report.violations or 'inconclusive margins'}")
        sys.exit(EXIT_FAILURE)


@exits_on_error
def verify_bounded(
    domain: str,
    b: str,
    h: float = 0.1,
    refinements: int = 2,
    tol_route: float = 1e-6,
    margin_ratio: float = 3.0,
    out: str = "",
    override_regime: bool = False,
    verbose: bool = False,
):
    """
    Verify the isoperimetric chain for one bounded domain.

    :param b:
        Comma separated field strengths.

    """
    built = parse_domain(domain)
    report = VerificationReport()
    for index, value in enumerate(parse_floats(b)):
        record, _ = verify_bounded_item(
            built,
            value,
            h=h,
            refinements=refinements,
            tolerances=_tolerances(tol_route, margin_ratio),
            index=index,
            override=override_regime,
        )
        report.bounded.append(record)
    report.passed = all(i.passed for i in report.bounded)
    _finish(report, out)


@exits_on_error
def verify_exterior(
    domain: str,
    b: str,
    n_panels: int = 512,
    margin_ratio: float = 3.0,
    out: str = "",
    override_regime: bool = False,
    verbose: bool = False,
):
    """
    Verify the exterior comparison for one domain.

    :param b:
        Comma separated field strengths.

    """
    built = parse_domain(domain)
    report = VerificationReport()
    for index, value in enumerate(parse_floats(b)):
        record, _ = verify_exterior_item(
            built,
            value,
            tolerances=Tolerances(margin_ratio=margin_ratio),
            n_panels=n_panels,
            index=index,
            override=override_regime,
        )
        report.exterior.append(record)
    report.passed = all(i.passed for i in report.exterior)
    _finish(report, out)


@exits_on_error
def run(
    config: str = "",
    out: str = "results",
    workers: int = 0,
    tol_route: float = 0.0,
    margin_ratio: float = 0.0,
    override_regime: bool = False,
    verbose: bool = False,
):
    """
    Run every campaign in a config file, and write ``report.json``,
    ``summary.csv`` and the per item tables. Exits with 0 only if every
    comparison passes.

    :param config:
        Path of the JSON config - the bundled default campaign if omitted.
    :param workers:
        Parallel processes, overriding the config.
    :param tol_route:
        Overrides the config's route tolerance.
    :param margin_ratio:
        Overrides the config's margin ratio.

    """
    campaign = load_config(config or DEFAULT_CAMPAIGN, override_regime)

    updates: t.Dict[str, t.Any] = {}
    if workers:
        updates["workers"] = workers
    tolerances = campaign.tolerances.model_copy(
        update={
            k: v
            for k, v in (("route", tol_route), ("margin_ratio", margin_ratio))
            if v
        }
    )
    campaign = campaign.model_copy(
        update={**updates, "tolerances": tolerances}
    )

    result = run_campaigns(campaign)
    _finish(result.report, out, result.tables)
