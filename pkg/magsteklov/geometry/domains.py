from __future__ import annotations
from dataclasses import dataclass, replace
from functools import lru_cache
import logging
import math
import typing as t

import numpy as np
from scipy.integrate import quad
from shapely.geometry import LinearRing, Polygon

from magsteklov.geometry.exceptions import NotSimple
from magsteklov.shared.exceptions import InvalidParameters


logger = logging.getLogger(__file__)


FAMILIES = (
    "disk",
    "ellipse",
    "rectangle",
    "regular-polygon",
    "perturbed-disk",
    "polygon",
)
POLYGONAL_FAMILIES = ("rectangle", "regular-polygon", "polygon")
SYMMETRIES = ("none", "central", "two-axes", "full-rotational")
SYMMETRY_TOLERANCE = 1e-10

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Domain:
    """
    A bounded simply-connected planar domain.

    Parametric families carry an exact boundary map ``theta -> point`` on
    ``[0, 2 pi)``, oriented counterclockwise. Polygonal families carry
    their vertices. Shape parameters are relative to ``center``.

    Family parameters:

    * ``disk`` - ``(R,)``
    * ``ellipse`` - ``(a, b)`` semi-axes
    * ``rectangle`` - ``(width, height)``
    * ``regular-polygon`` - ``(sides, circumradius)``
    * ``perturbed-disk`` - ``(epsilon, k, R)`` for
      ``r(theta) = R (1 + epsilon cos(k theta))``
    * ``polygon`` - no parameters, ``vertices`` instead

    """

    family: str
    params: t.Tuple[float, ...] = ()
    resolution: int = 512
    center: t.Tuple[float, float] = (0.0, 0.0)
    vertices: t.Optional[t.Tuple[t.Tuple[float, float], ...]] = None
    declared_symmetry: t.Optional[str] = None

    @property
    def polygonal(self) -> bool:
        return self.family in POLYGONAL_FAMILIES

    @property
    def origin(self) -> np.ndarray:
        return np.asarray(self.center, dtype=float)

    ###########################################################################
    # Polygonal families

    def polygon(self) -> np.ndarray:
        """
        Counterclockwise vertex array, in plane coordinates.
        """
        if self.family == "rectangle":
            width, height = self.params
            relative = 0.5 * np.array(
                [
                    [-width, -height],
                    [width, -height],
                    [width, height],
                    [-width, height],
                ]
            )
        elif self.family == "regular-polygon":
            sides, radius = int(self.params[0]), self.params[1]
            angles = TWO_PI * np.arange(sides) / sides
            relative = radius * np.stack((np.cos(angles), np.sin(angles)), 1)
        elif self.family == "polygon":
            return np.asarray(self.vertices, dtype=float)
        else:
            raise InvalidParameters(f"{self.family} isn't a polygonal family.")

        return relative + self.origin

    ###########################################################################
    # Parametric families

    def _radius(self, theta: np.ndarray, derivative: int = 0) -> np.ndarray:
        epsilon, k, radius = self.params
        if derivative == 0:
            return radius * (1.0 + epsilon * np.cos(k * theta))
        if derivative == 1:
            return -radius * epsilon * k * np.sin(k * theta)
        return -radius * epsilon * k * k * np.cos(k * theta)

    def point(self, theta: np.ndarray, derivative: int = 0) -> np.ndarray:
        """
        The boundary map (or its first or second derivative) at parameter
        values ``theta``, shaped ``(n, 2)``.
        """
        theta = np.asarray(theta, dtype=float)
        cos, sin = np.cos(theta), np.sin(theta)

        if self.family in ("disk", "ellipse"):
            a, b = (
                (self.params[0], self.params[0])
                if self.family == "disk"
                else self.params
            )
            if derivative == 0:
                relative = np.stack((a * cos, b * sin), -1)
            elif derivative == 1:
                relative = np.stack((-a * sin, b * cos), -1)
            else:
                relative = np.stack((-a * cos, -b * sin), -1)
        elif self.family == "perturbed-disk":
            r = self._radius(theta)
            if derivative == 0:
                relative = np.stack((r * cos, r * sin), -1)
            elif derivative == 1:
                dr = self._radius(theta, 1)
                relative = np.stack(
                    (dr * cos - r * sin, dr * sin + r * cos), -1
                )
            else:
                dr = self._radius(theta, 1)
                ddr = self._radius(theta, 2)
                relative = np.stack(
                    (
                        (ddr - r) * cos - 2.0 * dr * sin,
                        (ddr - r) * sin + 2.0 * dr * cos,
                    ),
                    -1,
                )
        else:
            raise InvalidParameters(
                f"{self.family} isn't a parametric family."
            )

        return relative + self.origin if derivative == 0 else relative

    def speed(self, theta: np.ndarray) -> np.ndarray:
        return np.linalg.norm(self.point(theta, 1), axis=-1)

    def curvature(self, theta: np.ndarray) -> np.ndarray:
        first = self.point(theta, 1)
        second = self.point(theta, 2)
        cross = first[..., 0] * second[..., 1] - first[..., 1] * second[..., 0]
        return cross / np.linalg.norm(first, axis=-1) ** 3

    def normal(self, theta: np.ndarray) -> np.ndarray:
        """
        Outward unit normal.
        """
        first = self.point(theta, 1)
        rotated = np.stack((first[..., 1], -first[..., 0]), -1)
        return rotated / np.linalg.norm(first, axis=-1)[..., None]

    def arclength_parameters(self, n: int) -> np.ndarray:
        """
        ``n`` parameter values splitting the boundary into arcs of equal
        length.
        """
        fine = np.linspace(0.0, TWO_PI, 64 * n + 1)
        speed = self.speed(fine)
        arclength = np.concatenate(
            ([0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(fine)))
        )
        targets = np.arange(n) * arclength[-1] / n
        return np.interp(targets, arclength, fine)

    ###########################################################################

    def sample(self, n: t.Optional[int] = None) -> np.ndarray:
        """
        A counterclockwise boundary polyline (without repeating the first
        point).
        """
        if self.polygonal:
            return self.polygon()
        n = n or self.resolution
        return self.point(TWO_PI * np.arange(n) / n)

    def shapely_polygon(self) -> Polygon:
        return Polygon(self.sample())

    def scaled(self, factor: float) -> Domain:
        """
        The image of the domain under ``x -> factor * x``.
        """
        if factor <= 0:
            raise InvalidParameters("Scale factors must be positive.")

        if self.family == "disk":
            params: t.Tuple[float, ...] = (self.params[0] * factor,)
        elif self.family in ("ellipse", "rectangle"):
            params = tuple(i * factor for i in self.params)
        elif self.family == "regular-polygon":
            params = (self.params[0], self.params[1] * factor)
        elif self.family == "perturbed-disk":
            params = (self.params[0], self.params[1], self.params[2] * factor)
        else:
            params = ()

        vertices = (
            tuple(tuple(float(j) * factor for j in i) for i in self.vertices)
            if self.vertices
            else None
        )
        center = (self.center[0] * factor, self.center[1] * factor)
        return replace(self, params=params, center=center, vertices=vertices)

    def translated(self, shift: t.Sequence[float]) -> Domain:
        vertices = (
            tuple((i[0] + shift[0], i[1] + shift[1]) for i in self.vertices)
            if self.vertices
            else None
        )
        center = (self.center[0] + shift[0], self.center[1] + shift[1])
        return replace(self, center=center, vertices=vertices)


@dataclass(frozen=True)
class DomainMetrics:
    area: float
    perimeter: float
    centroid: t.Tuple[float, float]
    convex: bool
    symmetry: str


###############################################################################
# Construction


PARAMETER_NAMES: t.Dict[str, t.Tuple[t.Tuple[str, ...], ...]] = {
    "disk": (("R", "radius"),),
    "ellipse": (("a",), ("b",)),
    "rectangle": (("width",), ("height",)),
    "regular-polygon": (("sides", "n"), ("radius", "circumradius")),
    "perturbed-disk": (("epsilon", "eps"), ("k",), ("R", "radius")),
    "polygon": (),
}


def _positional(family: str, params: t.Any) -> t.Tuple[float, ...]:
    if isinstance(params, (list, tuple)):
        values = [float(i) for i in params]
    else:
        values = []
        for aliases in PARAMETER_NAMES[family]:
            name = next((i for i in aliases if i in params), None)
            if name is None:
                if family == "perturbed-disk" and aliases[0] == "R":
                    values.append(1.0)
                    continue
                raise InvalidParameters(
                    f"{family} needs a parameter called {aliases[0]!r}."
                )
            values.append(float(params[name]))

    if family == "perturbed-disk" and len(values) == 2:
        values.append(1.0)
    return tuple(values)


def _check_parameters(domain: Domain):
    family, params = domain.family, domain.params

    if family not in FAMILIES:
        raise InvalidParameters(f"Unknown domain family {family!r}.")

    if domain.resolution < 16:
        raise InvalidParameters("The boundary resolution must be at least 16.")

    expected = len(PARAMETER_NAMES[family])
    if len(params) != expected:
        raise InvalidParameters(
            f"{family} takes {expected} parameters, got {len(params)}."
        )

    if family == "perturbed-disk":
        epsilon, k, radius = params
        if k < 1 or k != int(k):
            raise InvalidParameters("The perturbation order k must be >= 1.")
        if abs(epsilon) >= 1.0 / (1.0 + k * k):
            raise InvalidParameters(
                f"|epsilon| = {abs(epsilon)} must be below 1 / (1 + k^2) = "
                f"{1.0 / (1.0 + k * k):.6g}."
            )
        if radius <= 0:
            raise InvalidParameters("The radius must be positive.")
    elif family == "regular-polygon":
        sides, radius = params
        if sides < 3 or sides != int(sides):
            raise InvalidParameters("A regular polygon needs >= 3 sides.")
        if radius <= 0:
            raise InvalidParameters("The circumradius must be positive.")
    elif family == "polygon":
        if not domain.vertices or len(domain.vertices) < 3:
            raise InvalidParameters("A polygon needs at least 3 vertices.")
    elif any(i <= 0 for i in params):
        raise InvalidParameters(f"{family} sizes must be positive.")

    if domain.declared_symmetry not in (None,) + SYMMETRIES:
        raise InvalidParameters(
            f"Unknown symmetry {domain.declared_symmetry!r}."
        )


def _counterclockwise(vertices: np.ndarray) -> np.ndarray:
    x, y = vertices[:, 0], vertices[:, 1]
    signed = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    if signed == 0.0:
        raise InvalidParameters("The polygon has zero area.")
    return vertices if signed > 0 else vertices[::-1]


def build_domain(spec: t.Union[t.Dict[str, t.Any], Domain]) -> Domain:
    """
    Build and validate a domain.

    :param spec:
        Either a ``Domain``, or a dict like
        ``{"family": "ellipse", "params": {"a": 1.2, "b": 0.8333}}``. A
        ``square`` family with a ``side`` parameter is accepted as a
        shortcut for a rectangle. Optional keys are ``center``,
        ``resolution``, ``vertices`` and ``symmetry`` (polygons), and
        ``normalize`` - either ``{"area": A}`` or ``{"perimeter": L}``,
        which rescales the domain about its center.
    :returns:
        A validated ``Domain``.

    """
    if isinstance(spec, Domain):
        domain = spec
        normalize: t.Dict[str, float] = {}
    else:
        family = spec.get("family")
        params = spec.get("params", {})
        if family == "square":
            side = params["side"] if isinstance(params, dict) else params[0]
            family, params = "rectangle", [side, side]
        if family not in FAMILIES:
            raise InvalidParameters(f"Unknown domain family {family!r}.")

        vertices = spec.get("vertices")
        if vertices is not None:
            array = _counterclockwise(np.asarray(vertices, dtype=float))
            vertices = tuple(tuple(float(j) for j in i) for i in array)

        domain = Domain(
            family=family,
            params=_positional(family, params),
            resolution=int(spec.get("resolution", 512)),
            center=tuple(float(i) for i in spec.get("center", (0.0, 0.0))),
            vertices=vertices,
            declared_symmetry=spec.get("symmetry"),
        )
        normalize = spec.get("normalize") or {}

    _check_parameters(domain)

    if not LinearRing(domain.sample()).is_simple:
        raise NotSimple(f"The boundary of {domain.family} self-intersects.")

    if normalize:
        metrics = domain_metrics(domain)
        if "area" in normalize:
            factor = math.sqrt(float(normalize["area"]) / metrics.area)
        elif "perimeter" in normalize:
            factor = float(normalize["perimeter"]) / metrics.perimeter
        else:
            raise InvalidParameters("normalize takes 'area' or 'perimeter'.")
        domain = replace(domain.scaled(factor), center=domain.center)
        if domain.vertices:
            shift = np.asarray(domain.center) * (1.0 - factor)
            domain = replace(
                domain,
                vertices=tuple(
                    (i[0] + shift[0], i[1] + shift[1]) for i in domain.vertices
                ),
            )

    metrics = domain_metrics(domain)
    deficit = metrics.perimeter**2 - 4.0 * math.pi * metrics.area
    if deficit < -1e-12 * metrics.perimeter**2:
        raise InvalidParameters(
            f"Isoperimetric deficit {deficit} is negative - the metrics are "
            "inconsistent."
        )

    return domain


###############################################################################
# Metrics


def _integrate(function: t.Callable[[float], float]) -> float:
    value, _ = quad(
        function, 0.0, TWO_PI, limit=400, epsabs=1e-15, epsrel=1e-13
    )
    return value


def _polygon_metrics(vertices: np.ndarray):
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    perimeter = float(np.hypot(xn - x, yn - y).sum())
    centroid = (
        float(((x + xn) * cross).sum() / (6.0 * area)),
        float(((y + yn) * cross).sum() / (6.0 * area)),
    )

    edges = np.roll(vertices, -1, axis=0) - vertices
    turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[
        :, 1
    ] * np.roll(edges, -1, axis=0)[:, 0]
    convex = bool(np.all(turns >= -1e-12 * perimeter**2))
    return float(area), perimeter, centroid, convex


def _parametric_metrics(domain: Domain):
    if domain.family == "disk":
        radius = domain.params[0]
        return (
            math.pi * radius * radius,
            TWO_PI * radius,
            domain.center,
            True,
        )

    def cross(theta: float) -> float:
        p = domain.point(theta)
        d = domain.point(theta, 1)
        return p[0] * d[1] - p[1] * d[0]

    area = 0.5 * _integrate(cross)
    perimeter = _integrate(lambda theta: float(domain.speed(theta)))
    centroid = (
        _integrate(
            lambda theta: 0.5
            * domain.point(theta)[0] ** 2
            * domain.point(theta, 1)[1]
        )
        / area,
        -_integrate(
            lambda theta: 0.5
            * domain.point(theta)[1] ** 2
            * domain.point(theta, 1)[0]
        )
        / area,
    )
    count = 4 * domain.resolution
    samples = TWO_PI * np.arange(count) / count
    convex = bool(np.all(domain.curvature(samples) > 0.0))
    return area, perimeter, centroid, convex


def _reflection(angle: float) -> np.ndarray:
    return np.array(
        [
            [math.cos(2 * angle), math.sin(2 * angle)],
            [math.sin(2 * angle), -math.cos(2 * angle)],
        ]
    )


def _maps_onto_itself(points: np.ndarray, matrix: np.ndarray) -> bool:
    """
    Whether the vertex set is invariant under the linear map.
    """
    image = points @ matrix.T
    distances = np.linalg.norm(image[:, None, :] - points[None, :, :], axis=-1)
    scale = max(np.abs(points).max(), 1.0)
    return bool(np.all(distances.min(axis=1) < SYMMETRY_TOLERANCE * scale))


def _polygon_axes(points: np.ndarray) -> t.List[float]:
    """
    Axis angles (through the origin) which are symmetry axes of the vertex
    set. Candidate axes pass through vertices and edge midpoints.
    """
    midpoints = 0.5 * (points + np.roll(points, -1, axis=0))
    candidates = np.concatenate((points, midpoints))
    angles = np.mod(np.arctan2(candidates[:, 1], candidates[:, 0]), math.pi)

    axes: t.List[float] = []
    for angle in angles:
        if any(abs(angle - i) < 1e-9 for i in axes):
            continue
        if _maps_onto_itself(points, _reflection(angle)):
            axes.append(float(angle))
    return axes


def _verify_parametric(domain: Domain, claim: str) -> bool:
    n = domain.resolution
    theta = TWO_PI * np.arange(n) / n
    relative = domain.point(theta) - domain.origin
    scale = max(np.abs(relative).max(), 1.0)

    def check(theta_map: np.ndarray, matrix: np.ndarray) -> bool:
        image = domain.point(theta_map) - domain.origin
        return bool(
            np.abs(image - relative @ matrix.T).max()
            < SYMMETRY_TOLERANCE * scale
        )

    x_axis = check(-theta, _reflection(0.0))
    if claim == "full-rotational":
        return x_axis and check(theta + math.pi, -np.eye(2))
    if domain.family == "perturbed-disk":
        angle = math.pi / domain.params[1]
        return x_axis and check(2 * angle - theta, _reflection(angle))
    return x_axis and check(math.pi - theta, _reflection(math.pi / 2))


def _claimed_symmetry(domain: Domain) -> str:
    family = domain.family
    if family == "disk":
        return "full-rotational"
    if family == "perturbed-disk":
        epsilon, k, _ = domain.params
        if epsilon == 0.0:
            return "full-rotational"
        return "two-axes" if k >= 2 else "none"
    if family in ("ellipse", "rectangle", "regular-polygon"):
        return "two-axes"
    return domain.declared_symmetry or "none"


def detect_symmetry(domain: Domain) -> str:
    """
    The family's declared symmetry, confirmed on the sampled boundary.
    Arbitrary polygons must declare theirs. A claim which fails the check
    is downgraded to ``none``.
    """
    claim = _claimed_symmetry(domain)
    if claim == "none":
        return claim

    if domain.polygonal:
        points = domain.polygon() - domain.origin
        if domain.family == "polygon":
            area, _, centroid, _ = _polygon_metrics(domain.polygon())
            points = domain.polygon() - np.asarray(centroid)
        if claim == "central":
            confirmed = _maps_onto_itself(points, -np.eye(2))
        else:
            confirmed = len(_polygon_axes(points)) >= 2
    else:
        confirmed = _verify_parametric(domain, claim)

    if not confirmed:
        logger.warning(
            f"The {claim} symmetry of {domain.family} failed the sampled "
            "boundary check - treating the domain as asymmetric."
        )
        return "none"
    return claim


@lru_cache(maxsize=256)
def domain_metrics(domain: Domain) -> DomainMetrics:
    """
    Area, perimeter, centroid, convexity and symmetry of the domain.
    Polygons use exact formulas; parametric boundaries use adaptive
    quadrature, apart from the disk which is exact.
    """
    if domain.polygonal:
        area, perimeter, centroid, convex = _polygon_metrics(domain.polygon())
    else:
        area, perimeter, centroid, convex = _parametric_metrics(domain)

    return DomainMetrics(
        area=float(area),
        perimeter=float(perimeter),
        centroid=(float(centroid[0]), float(centroid[1])),
        convex=convex,
        symmetry=detect_symmetry(domain),
    )
