from __future__ import annotations
from dataclasses import dataclass, replace
import logging
import math
import typing as t

import numpy as np
import shapely
from scipy.spatial import Delaunay

from magsteklov.geometry.domains import Domain
from magsteklov.meshing.exceptions import DegenerateMesh
from magsteklov.meshing.mesh import Mesh, boundary_trace
from magsteklov.shared.exceptions import InvalidParameters


logger = logging.getLogger(__file__)


MIN_BOUNDARY_NODES = 16
MIN_ANGLE = 20.0


@dataclass
class MeshOptions:
    """
    :param h:
        Target edge length of the coarsest mesh.
    :param refinement_levels:
        Number of uniform quadrisections applied afterwards.
    :param smoothing_passes:
        Laplacian smoothing passes on the interior nodes.
    :param clearances:
        Minimum distance of interior lattice points from the boundary, in
        units of ``h``. Each value is one attempt; the first which meets
        the angle bound wins.

    """

    h: float = 0.1
    refinement_levels: int = 0
    smoothing_passes: int = 4
    clearances: t.Tuple[float, ...] = (0.6, 0.7, 0.5, 0.8)


###############################################################################
# Boundary


def _period(domain: Domain) -> float:
    return (
        float(domain.polygon().shape[0]) if domain.polygonal else 2.0 * math.pi
    )


def boundary_points(domain: Domain, parameters: np.ndarray) -> np.ndarray:
    """
    Points on the exact boundary. Polygon parameters are the edge index
    plus the fraction along the edge.
    """
    if not domain.polygonal:
        return domain.point(parameters)

    vertices = domain.polygon()
    n = vertices.shape[0]
    wrapped = np.mod(parameters, n)
    index = np.minimum(np.floor(wrapped).astype(int), n - 1)
    fraction = (wrapped - index)[:, None]
    following = vertices[(index + 1) % n]
    return vertices[index] + fraction * (following - vertices[index])


def boundary_samples(domain: Domain, h: float) -> np.ndarray:
    """
    Boundary parameters at spacing at most ``h``, counterclockwise.
    """
    if domain.polygonal:
        vertices = domain.polygon()
        edges = np.roll(vertices, -1, axis=0) - vertices
        parameters = []
        for i, edge in enumerate(edges):
            pieces = max(1, math.ceil(np.linalg.norm(edge) / h))
            parameters.extend(i + np.arange(pieces) / pieces)
        result = np.array(parameters)
    else:
        theta = np.linspace(0.0, 2.0 * math.pi, 4 * domain.resolution + 1)
        speed = domain.speed(theta)
        perimeter = float(
            np.sum(0.5 * (speed[1:] + speed[:-1]) * np.diff(theta))
        )
        result = domain.arclength_parameters(math.ceil(perimeter / h))

    if result.shape[0] < MIN_BOUNDARY_NODES:
        raise InvalidParameters(
            f"h = {h!r} gives only {result.shape[0]} boundary nodes - at "
            f"least {MIN_BOUNDARY_NODES} are needed."
        )
    return result


###############################################################################
# Interior


def hex_lattice(domain: Domain, h: float, clearance: float) -> np.ndarray:
    """
    Points of a hexagonal lattice with spacing ``h`` centered on the
    domain center, keeping those inside the domain and at least
    ``clearance * h`` from its boundary.
    """
    polygon = domain.shapely_polygon()
    minx, miny, maxx, maxy = polygon.bounds
    cx, cy = domain.center
    row = h * math.sqrt(3.0) / 2.0

    columns = math.ceil(max(maxx - cx, cx - minx) / h) + 1
    rows = math.ceil(max(maxy - cy, cy - miny) / row) + 1
    j, i = np.meshgrid(
        np.arange(-rows, rows + 1), np.arange(-columns, columns + 1)
    )
    x = cx + (i + 0.5 * (j % 2)) * h
    y = cy + j * row
    x, y = x.ravel(), y.ravel()

    inside = shapely.contains_xy(polygon, x, y)
    x, y = x[inside], y[inside]
    distance = shapely.distance(polygon.exterior, shapely.points(x, y))
    keep = distance >= clearance * h
    return np.stack((x[keep], y[keep]), 1)


def _delaunay(points: np.ndarray, domain: Domain) -> np.ndarray:
    triangles = Delaunay(points).simplices
    centroids = points[triangles].mean(axis=1)
    inside = shapely.contains_xy(
        domain.shapely_polygon(), centroids[:, 0], centroids[:, 1]
    )
    return _counterclockwise(points, triangles[inside])


def _counterclockwise(points: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a, b, c = (points[triangles[:, i]] for i in range(3))
    signed = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
    signed = signed - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    triangles = triangles.copy()
    flip = signed < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def _smooth(
    points: np.ndarray, triangles: np.ndarray, n_boundary: int
) -> np.ndarray:
    """
    One Laplacian pass: every interior node moves to the mean of its
    neighbours. Boundary nodes come first and stay put.
    """
    n = points.shape[0]
    pairs = np.concatenate(
        (triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]])
    )
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)
    total = np.zeros_like(points)
    count = np.zeros(n)
    for a, b in ((0, 1), (1, 0)):
        np.add.at(total, pairs[:, a], points[pairs[:, b]])
        np.add.at(count, pairs[:, a], 1.0)

    smoothed = points.copy()
    interior = np.arange(n_boundary, n)
    interior = interior[count[interior] > 0]
    smoothed[interior] = total[interior] / count[interior, None]
    return smoothed


def _boundary_edges(triangles: np.ndarray) -> np.ndarray:
    """
    Edges used by one triangle only, oriented as in that triangle - which
    is counterclockwise around the domain.
    """
    directed = np.concatenate(
        (triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]])
    )
    _, index, counts = np.unique(
        np.sort(directed, axis=1),
        axis=0,
        return_index=True,
        return_counts=True,
    )
    return directed[np.sort(index[counts == 1])]


def _angles(points: np.ndarray, triangles: np.ndarray) -> float:
    p = points[triangles]
    smallest = np.inf
    for i in range(3):
        u = p[:, (i + 1) % 3] - p[:, i]
        v = p[:, (i + 2) % 3] - p[:, i]
        cosine = np.sum(u * v, 1) / (
            np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)
        )
        angles = np.degrees(np.arccos(np.clip(cosine, -1, 1)))
        smallest = min(smallest, float(angles.min()))
    return smallest


###############################################################################


def _coarse_mesh(domain: Domain, options: MeshOptions) -> Mesh:
    h = options.h
    parameters = boundary_samples(domain, h)
    boundary = boundary_points(domain, parameters)
    n_boundary = boundary.shape[0]

    attempts = []
    for clearance in options.clearances:
        interior = hex_lattice(domain, h, clearance)
        points = np.concatenate((boundary, interior))
        triangles = _delaunay(points, domain)
        for _ in range(options.smoothing_passes):
            points = _smooth(points, triangles, n_boundary)
            triangles = _delaunay(points, domain)

        used = np.zeros(points.shape[0], dtype=bool)
        used[triangles.ravel()] = True
        if not used.all():
            attempts.append((clearance, "unused nodes"))
            continue

        min_angle = _angles(points, triangles)
        if min_angle < MIN_ANGLE:
            attempts.append((clearance, f"min angle {min_angle:.2f}"))
            continue

        flags = np.zeros(points.shape[0], dtype=bool)
        flags[:n_boundary] = True
        node_parameters = np.full(points.shape[0], np.nan)
        node_parameters[:n_boundary] = parameters

        mesh = Mesh(
            nodes=points,
            triangles=triangles,
            boundary_edges=_boundary_edges(triangles),
            boundary=flags,
            h=h,
            boundary_parameters=node_parameters,
            domain=domain,
        )
        if mesh.boundary_edges.shape[0] != n_boundary:
            attempts.append((clearance, "boundary edges missing"))
            continue

        boundary_trace(mesh)
        logger.debug(
            f"Meshed {domain.family} with {mesh.n_nodes} nodes, "
            f"min angle {min_angle:.2f} (clearance {clearance})."
        )
        return mesh

    raise DegenerateMesh(
        f"No acceptable mesh of {domain.family} at h = {h!r}: {attempts}"
    )


def refine(mesh: Mesh) -> Mesh:
    """
    Quadrisect every triangle. New boundary nodes are put on the exact
    boundary, using the boundary parameters of their edge ends.
    """
    edges = mesh.edges()
    n_nodes = mesh.n_nodes
    n_edges = edges.shape[0]

    lookup = {(int(a), int(b)): i for i, (a, b) in enumerate(edges)}

    def edge_index(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        low, high = np.minimum(a, b), np.maximum(a, b)
        return np.array([lookup[(i, j)] for i, j in zip(low, high)])

    triangles = mesh.triangles
    cell_to_edge = np.stack(
        (
            edge_index(triangles[:, 1], triangles[:, 2]),
            edge_index(triangles[:, 2], triangles[:, 0]),
            edge_index(triangles[:, 0], triangles[:, 1]),
        ),
        1,
    )
    new_nodes = 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])
    new_parameters = np.full(n_edges, np.nan)

    boundary_edge_index = edge_index(
        mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1]
    )
    if mesh.domain is not None:
        period = _period(mesh.domain)
        start = mesh.boundary_parameters[mesh.boundary_edges[:, 0]]
        end = mesh.boundary_parameters[mesh.boundary_edges[:, 1]]
        end = np.where(end < start, end + period, end)
        middle = np.mod(0.5 * (start + end), period)
        new_parameters[boundary_edge_index] = middle
        new_nodes[boundary_edge_index] = boundary_points(mesh.domain, middle)

    edge_to_node = np.arange(n_nodes, n_nodes + n_edges)
    p = np.concatenate((triangles, edge_to_node[cell_to_edge]), axis=1)
    refined = np.concatenate(
        (
            p[:, [0, 5, 4]],
            p[:, [5, 1, 3]],
            p[:, [4, 3, 2]],
            p[:, [3, 4, 5]],
        )
    )

    boundary_edges = np.concatenate(
        (
            np.stack(
                (mesh.boundary_edges[:, 0], edge_to_node[boundary_edge_index]),
                1,
            ),
            np.stack(
                (edge_to_node[boundary_edge_index], mesh.boundary_edges[:, 1]),
                1,
            ),
        )
    )

    flags = np.zeros(n_nodes + n_edges, dtype=bool)
    flags[:n_nodes] = mesh.boundary
    flags[edge_to_node[boundary_edge_index]] = True

    return replace(
        mesh,
        nodes=np.concatenate((mesh.nodes, new_nodes)),
        triangles=refined,
        boundary_edges=boundary_edges,
        boundary=flags,
        h=0.5 * mesh.h,
        boundary_parameters=np.concatenate(
            (mesh.boundary_parameters, new_parameters)
        ),
        level=mesh.level + 1,
    )


def triangulate(
    domain: Domain,
    h: float,
    refinement_levels: int = 0,
    options: t.Optional[MeshOptions] = None,
) -> Mesh:
    """
    Mesh the domain with linear triangles.

    The boundary is sampled at spacing at most ``h``, the interior is
    filled with a hexagonal lattice, and the points are Delaunay
    triangulated and smoothed. Each refinement level then quadrisects every
    triangle.

    :raises InvalidParameters:
        If ``h`` gives fewer than 16 boundary nodes.
    :raises DegenerateMesh:
        If the minimum angle stays below 20 degrees.

    """
    if h <= 0:
        raise InvalidParameters("The mesh size must be positive.")
    if refinement_levels < 0:
        raise InvalidParameters("refinement_levels can't be negative.")

    options = replace(
        options or MeshOptions(), h=h, refinement_levels=refinement_levels
    )
    mesh = _coarse_mesh(domain, options)
    for _ in range(refinement_levels):
        mesh = refine(mesh)

    min_angle = mesh.min_angle()
    if min_angle < MIN_ANGLE:
        raise DegenerateMesh(
            f"Refinement left a minimum angle of {min_angle:.2f} degrees."
        )

    logger.info(
        f"Mesh of {domain.family}: h={mesh.h!r}, {mesh.n_nodes} nodes, "
        f"{mesh.n_triangles} triangles, min angle {min_angle:.2f}."
    )
    return mesh


def refinement_sequence(
    domain: Domain, h: float, levels: int
) -> t.List[Mesh]:
    """
    The coarse mesh followed by ``levels`` successive refinements.
    """
    meshes = [triangulate(domain, h)]
    for _ in range(levels):
        meshes.append(refine(meshes[-1]))
    return meshes
