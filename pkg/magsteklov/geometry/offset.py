"""
Outer parallel curves ``Sigma_t = {x : dist(x, domain) = t}`` and the
functionals the exterior comparison needs: length, centroid and
``int_{Sigma_t} |x|^2 ds``.

For disks, convex polygons and smooth convex boundaries these are
polynomials in ``t``::

    length = L + K t
    int x ds = c0 + c1 t + c2 t^2
    int |x|^2 ds = m0 + m1 t + m2 t^2 + K t^3

with ``K`` the total curvature (2 pi), so their coefficients are computed
once per domain.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from functools import lru_cache
import logging
import math
import os
import typing as t

import numpy as np
import shapely
from scipy.integrate import quad_vec
from shapely.geometry import LinearRing

from magsteklov.geometry.contours import marching_squares
from magsteklov.geometry.domains import Domain, domain_metrics
from magsteklov.geometry.exceptions import NotSimple, UnsupportedDomain
from magsteklov.shared.exceptions import InvalidParameters
from magsteklov.shared.tables import write_csv


logger = logging.getLogger(__file__)


ARC_POINTS = 64


@dataclass(frozen=True)
class OffsetCurve:
    offset: float = field(metadata={"help_text": "Distance from the domain."})
    vertices: np.ndarray = field(
        repr=False, metadata={"help_text": "Polyline approximating the curve."}
    )
    length: float = 0.0
    centroid: t.Tuple[float, float] = (0.0, 0.0)
    second_moment: float = field(
        default=0.0, metadata={"help_text": "int |x|^2 ds along the curve."}
    )
    simple: bool = True
    method: str = "exact"


@dataclass(frozen=True)
class MomentCoefficients:
    perimeter: float
    total_curvature: float
    first: np.ndarray = field(
        metadata={"help_text": "Rows c0, c1, c2 of int x ds."}
    )
    second: np.ndarray = field(
        metadata={"help_text": "m0, m1, m2 of int |x|^2 ds."}
    )

    def length(self, t_value: np.ndarray) -> np.ndarray:
        return self.perimeter + self.total_curvature * t_value

    def first_moment(self, t_value: np.ndarray) -> np.ndarray:
        t_value = np.asarray(t_value, dtype=float)[..., None]
        c0, c1, c2 = self.first
        return c0 + t_value * (c1 + t_value * c2)

    def second_moment(self, t_value: np.ndarray) -> np.ndarray:
        m0, m1, m2 = self.second
        return m0 + t_value * (
            m1 + t_value * (m2 + t_value * self.total_curvature)
        )


###############################################################################
# Piecewise integrals


def segment_integrals(P: np.ndarray, Q: np.ndarray):
    """
    Length, ``int x ds`` and ``int |x|^2 ds`` over the segments ``P -> Q``
    (arrays of shape ``(n, 2)``), summed.
    """
    d = Q - P
    lengths = np.linalg.norm(d, axis=-1)
    first = (lengths[:, None] * 0.5 * (P + Q)).sum(axis=0)
    second = (
        lengths
        * (np.sum(P * P, -1) + np.sum(P * d, -1) + lengths**2 / 3.0)
    ).sum()
    return float(lengths.sum()), first, float(second)


def polyline_curve(t_value: float, vertices: np.ndarray, method: str):
    P = vertices
    Q = np.roll(vertices, -1, axis=0)
    length, first, second = segment_integrals(P, Q)
    return OffsetCurve(
        offset=t_value,
        vertices=vertices,
        length=length,
        centroid=(float(first[0] / length), float(first[1] / length)),
        second_moment=second,
        simple=bool(LinearRing(vertices).is_simple),
        method=method,
    )


###############################################################################
# Coefficients


def _disk_coefficients(domain: Domain) -> MomentCoefficients:
    radius = domain.params[0]
    c = domain.origin
    c2 = float(c @ c)
    two_pi = 2.0 * math.pi
    return MomentCoefficients(
        perimeter=two_pi * radius,
        total_curvature=two_pi,
        first=np.array((two_pi * radius * c, two_pi * c, np.zeros(2))),
        second=np.array(
            (
                two_pi * (radius**3 + c2 * radius),
                two_pi * (3.0 * radius**2 + c2),
                two_pi * 3.0 * radius,
            )
        ),
    )


def _corner_sweeps(vertices: np.ndarray):
    edges = np.roll(vertices, -1, axis=0) - vertices
    lengths = np.linalg.norm(edges, axis=1)
    normals = np.stack((edges[:, 1], -edges[:, 0]), 1) / lengths[:, None]
    angles = np.arctan2(normals[:, 1], normals[:, 0])
    # The arc at vertex i + 1 turns from normal i to normal i + 1.
    start = angles
    sweep = np.mod(np.roll(angles, -1) - angles, 2.0 * math.pi)
    return edges, lengths, normals, start, sweep


def _polygon_coefficients(domain: Domain) -> MomentCoefficients:
    """
    Translated edges give ``l (|V|^2 + V.e + l^2 / 3) + 2 t l V.n + t^2 l``,
    and the corner arcs ``t D |V|^2 + 2 t^2 V.w + t^3 D``, with ``D`` the
    turning angle and ``w = (sin phi1 - sin phi0, cos phi0 - cos phi1)``.
    """
    vertices = domain.polygon()
    edges, lengths, normals, start, sweep = _corner_sweeps(vertices)
    corners = np.roll(vertices, -1, axis=0)
    finish = start + sweep
    w = np.stack(
        (np.sin(finish) - np.sin(start), np.cos(start) - np.cos(finish)), 1
    )

    square = np.sum(vertices * vertices, 1)
    c0 = (lengths[:, None] * 0.5 * (vertices + corners)).sum(0)
    c1 = (lengths[:, None] * normals).sum(0)
    c1 = c1 + (sweep[:, None] * corners).sum(0)
    c2 = w.sum(0)

    m0 = np.sum(
        lengths * (square + np.sum(vertices * edges, 1) + lengths**2 / 3.0)
    )
    m1 = np.sum(2.0 * lengths * np.sum(vertices * normals, 1)) + np.sum(
        sweep * np.sum(corners * corners, 1)
    )
    m2 = lengths.sum() + 2.0 * np.sum(np.sum(corners * w, 1))

    return MomentCoefficients(
        perimeter=float(lengths.sum()),
        total_curvature=float(sweep.sum()),
        first=np.array((c0, c1, c2)),
        second=np.array((m0, m1, m2)),
    )


def _parametric_coefficients(domain: Domain) -> MomentCoefficients:
    """
    With ``x_t = x + t nu`` and ``ds_t = (1 + t kappa) ds`` every functional
    is a polynomial in ``t`` whose coefficients are boundary integrals.
    """

    def integrand(theta: float) -> np.ndarray:
        x = domain.point(theta)
        d1 = domain.point(theta, 1)
        d2 = domain.point(theta, 2)
        speed = math.hypot(d1[0], d1[1])
        nu = np.array((d1[1], -d1[0])) / speed
        kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / speed**3
        xx = float(x @ x)
        xn = float(x @ nu)
        return speed * np.array(
            (
                1.0,
                kappa,
                xx,
                2.0 * xn + kappa * xx,
                1.0 + 2.0 * kappa * xn,
                x[0],
                x[1],
                nu[0] + kappa * x[0],
                nu[1] + kappa * x[1],
                kappa * nu[0],
                kappa * nu[1],
            )
        )

    values, _ = quad_vec(
        integrand, 0.0, 2.0 * math.pi, epsabs=1e-14, epsrel=1e-13, limit=4000
    )
    return MomentCoefficients(
        perimeter=float(values[0]),
        total_curvature=float(values[1]),
        first=values[5:].reshape(3, 2),
        second=values[2:5],
    )


@lru_cache(maxsize=64)
def moment_coefficients(domain: Domain) -> MomentCoefficients:
    """
    :raises UnsupportedDomain:
        For nonconvex domains, whose offsets aren't polynomial.

    """
    metrics = domain_metrics(domain)
    if domain.family == "disk":
        return _disk_coefficients(domain)
    if not metrics.convex:
        raise UnsupportedDomain(
            f"{domain.family} isn't convex - its offsets have no closed form."
        )
    if domain.polygonal:
        return _polygon_coefficients(domain)
    return _parametric_coefficients(domain)


###############################################################################
# Curves


def _exact_vertices(domain: Domain, t_value: float) -> np.ndarray:
    if domain.family == "disk":
        radius = domain.params[0] + t_value
        count = domain.resolution
        angles = 2.0 * math.pi * np.arange(count) / count
        return domain.origin + radius * np.stack(
            (np.cos(angles), np.sin(angles)), 1
        )

    if domain.polygonal:
        vertices = domain.polygon()
        _, _, normals, start, sweep = _corner_sweeps(vertices)
        corners = np.roll(vertices, -1, axis=0)
        polyline = []
        for i in range(vertices.shape[0]):
            polyline.append(vertices[i] + t_value * normals[i])
            phis = np.linspace(start[i], start[i] + sweep[i], ARC_POINTS)
            polyline.extend(
                corners[i]
                + t_value * np.stack((np.cos(phis), np.sin(phis)), 1)
            )
        return np.array(polyline)

    theta = domain.arclength_parameters(domain.resolution)
    return domain.point(theta) + t_value * domain.normal(theta)


def _grid_offset(
    domain: Domain, t_value: float, h_grid: t.Optional[float]
) -> OffsetCurve:
    """
    The level ``t`` of the distance to the domain, sampled on a uniform
    grid and contoured by marching squares.
    """
    polygon = domain.shapely_polygon()
    if h_grid is None:
        h_grid = domain_metrics(domain).perimeter / 2000.0

    minx, miny, maxx, maxy = polygon.bounds
    pad = t_value + 3.0 * h_grid
    xs = np.arange(minx - pad, maxx + pad + h_grid, h_grid)
    ys = np.arange(miny - pad, maxy + pad + h_grid, h_grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    distance = shapely.distance(
        polygon, shapely.points(X.ravel(), Y.ravel())
    ).reshape(X.shape)

    loops = marching_squares(distance, xs, ys, t_value)
    curve = polyline_curve(t_value, loops[0], method="grid")
    if len(loops) > 1:
        logger.warning(
            f"The offset at t={t_value!r} has {len(loops)} components."
        )
        return OffsetCurve(
            offset=curve.offset,
            vertices=curve.vertices,
            length=curve.length,
            centroid=curve.centroid,
            second_moment=curve.second_moment,
            simple=False,
            method="grid",
        )
    return curve


def offset_curve(
    domain: Domain,
    t_value: float,
    grid_fallback: bool = False,
    h_grid: t.Optional[float] = None,
) -> OffsetCurve:
    """
    The outer parallel curve at distance ``t_value``.

    Disks and convex polygons are exact, smooth convex boundaries are exact
    up to the quadrature of their moment coefficients. Anything else needs
    ``grid_fallback``, and a symmetric domain.

    :raises NotSimple:
        If the curve isn't a simple closed curve.
    :raises UnsupportedDomain:
        For nonconvex domains without the grid fallback.

    """
    if t_value <= 0:
        raise InvalidParameters("The offset distance must be positive.")

    metrics = domain_metrics(domain)

    if domain.family == "disk" or metrics.convex:
        coefficients = moment_coefficients(domain)
        length = float(coefficients.length(t_value))
        first = coefficients.first_moment(t_value)
        curve = OffsetCurve(
            offset=t_value,
            vertices=_exact_vertices(domain, t_value),
            length=length,
            centroid=(float(first[0] / length), float(first[1] / length)),
            second_moment=float(coefficients.second_moment(t_value)),
        )
    elif grid_fallback and metrics.symmetry != "none":
        curve = _grid_offset(domain, t_value, h_grid)
    else:
        raise UnsupportedDomain(
            f"Offsets of nonconvex {domain.family} domains need the grid "
            "fallback and a symmetric domain."
        )

    if not curve.simple:
        raise NotSimple(
            f"The parallel curve at t={t_value!r} isn't a simple closed curve."
        )
    return curve


@dataclass(frozen=True)
class OffsetFunctionals:
    offset: np.ndarray
    length: np.ndarray
    centroid: np.ndarray
    second_moment: np.ndarray


def offset_functionals(
    domain: Domain,
    t_values: np.ndarray,
    grid_fallback: bool = False,
    h_grid: t.Optional[float] = None,
) -> OffsetFunctionals:
    """
    Length, centroid and second moment on many distances at once. Convex
    domains use their polynomial coefficients; the grid fallback contours
    every distance separately.
    """
    t_values = np.asarray(t_values, dtype=float)
    metrics = domain_metrics(domain)

    if domain.family == "disk" or metrics.convex:
        coefficients = moment_coefficients(domain)
        length = coefficients.length(t_values)
        return OffsetFunctionals(
            offset=t_values,
            length=length,
            centroid=coefficients.first_moment(t_values) / length[:, None],
            second_moment=coefficients.second_moment(t_values),
        )

    curves = [
        offset_curve(domain, float(i), grid_fallback, h_grid) for i in t_values
    ]
    return OffsetFunctionals(
        offset=t_values,
        length=np.array([i.length for i in curves]),
        centroid=np.array([i.centroid for i in curves]),
        second_moment=np.array([i.second_moment for i in curves]),
    )


def hurwitz_check(curve: OffsetCurve) -> float:
    """
    ``length^3 / (4 pi^2) - int |x|^2 ds``, which is non-negative for a
    closed curve whose centroid is at the origin, and zero only for a
    circle.
    """
    return curve.length**3 / (4.0 * math.pi**2) - curve.second_moment


OFFSET_HEADER = ("t", "length", "cx", "cy", "second_moment", "simple")


def offset_table(
    domain: Domain,
    t_grid: t.Iterable[float],
    path: t.Optional[t.Union[str, os.PathLike]] = None,
    **kwargs,
) -> t.List[OffsetCurve]:
    """
    ``offset_curve`` over a grid of distances, optionally written to CSV.
    Extra keyword arguments go to ``offset_curve``.
    """
    curves = [offset_curve(domain, float(i), **kwargs) for i in t_grid]
    if path is not None:
        write_csv(
            path,
            OFFSET_HEADER,
            [
                (
                    i.offset,
                    i.length,
                    i.centroid[0],
                    i.centroid[1],
                    i.second_moment,
                    i.simple,
                )
                for i in curves
            ],
        )
    return curves
