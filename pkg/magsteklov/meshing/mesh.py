from __future__ import annotations
from dataclasses import dataclass, field, replace
from functools import cached_property
import logging
import typing as t

import numpy as np

from magsteklov.geometry.domains import Domain
from magsteklov.meshing.exceptions import DisconnectedBoundary


logger = logging.getLogger(__file__)


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    A conforming mesh of linear triangles.

    ``boundary_parameters`` holds, for boundary nodes, the position on the
    exact boundary (the curve parameter, or for polygons the edge index
    plus the fraction along it), and NaN elsewhere. Refinement uses it to
    put new boundary nodes back on the boundary.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary: np.ndarray
    h: float
    boundary_parameters: np.ndarray = field(repr=False)
    domain: t.Optional[Domain] = None
    level: int = 0

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @cached_property
    def signed_areas(self) -> np.ndarray:
        a, b, c = (self.nodes[self.triangles[:, i]] for i in range(3))
        return 0.5 * (
            (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
            - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
        )

    @property
    def area(self) -> float:
        return float(self.signed_areas.sum())

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """
        Gradients of the three hat functions on every triangle, shaped
        ``(n_triangles, 3, 2)``.
        """
        p = self.nodes[self.triangles]
        twice_area = 2.0 * self.signed_areas
        gradients = np.empty((self.n_triangles, 3, 2))
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            gradients[:, i, 0] = p[:, j, 1] - p[:, k, 1]
            gradients[:, i, 1] = p[:, k, 0] - p[:, j, 0]
        return gradients / twice_area[:, None, None]

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    def angles(self) -> np.ndarray:
        """
        Interior angles in degrees, shaped ``(n_triangles, 3)``.
        """
        p = self.nodes[self.triangles]
        result = np.empty((self.n_triangles, 3))
        for i in range(3):
            u = p[:, (i + 1) % 3] - p[:, i]
            v = p[:, (i + 2) % 3] - p[:, i]
            cosine = np.sum(u * v, 1) / (
                np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)
            )
            result[:, i] = np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0)))
        return result

    def min_angle(self) -> float:
        return float(self.angles().min())

    def edges(self) -> np.ndarray:
        """
        Unique undirected edges, as sorted index pairs.
        """
        pairs = np.concatenate(
            (
                self.triangles[:, [0, 1]],
                self.triangles[:, [1, 2]],
                self.triangles[:, [2, 0]],
            )
        )
        return np.unique(np.sort(pairs, axis=1), axis=0)

    @property
    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.boundary)

    @property
    def interior_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    def scaled(self, factor: float) -> Mesh:
        """
        The image of the mesh under ``x -> factor * x``.
        """
        domain = self.domain.scaled(factor) if self.domain else None
        return replace(
            self, nodes=self.nodes * factor, h=self.h * factor, domain=domain
        )


@dataclass(frozen=True)
class BoundaryTrace:
    order: np.ndarray
    weights: np.ndarray

    @property
    def perimeter(self) -> float:
        return float(self.weights.sum())


def boundary_trace(mesh: Mesh) -> BoundaryTrace:
    """
    Boundary nodes in counterclockwise order, with lumped arc length
    weights (half of each adjacent boundary edge).

    :raises DisconnectedBoundary:
        If the boundary edges aren't a single closed cycle.

    """
    following: t.Dict[int, int] = {}
    for start, end in mesh.boundary_edges:
        if start in following:
            raise DisconnectedBoundary(
                f"Boundary node {start} starts two boundary edges."
            )
        following[int(start)] = int(end)

    if not following:
        raise DisconnectedBoundary("The mesh has no boundary edges.")

    first = int(mesh.boundary_edges[0, 0])
    order = [first]
    current = following[first]
    while current != first:
        if current not in following or len(order) > len(following):
            raise DisconnectedBoundary(
                "The boundary edges don't close into a cycle."
            )
        order.append(current)
        current = following[current]

    if len(order) != len(following):
        raise DisconnectedBoundary(
            f"The boundary has {len(following) - len(order)} edges outside "
            "the main cycle."
        )

    order_array = np.array(order)
    points = mesh.nodes[order_array]
    lengths = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
    weights = 0.5 * (lengths + np.roll(lengths, 1))
    return BoundaryTrace(order=order_array, weights=weights)


def euler_characteristic(mesh: Mesh) -> int:
    return mesh.n_nodes - mesh.edges().shape[0] + mesh.n_triangles
