"""
Marching squares on a rectangular grid of samples.
"""
from __future__ import annotations
import typing as t

import numpy as np


# Corners are numbered counterclockwise from the lower left of a cell:
# 0 = (i, j), 1 = (i + 1, j), 2 = (i + 1, j + 1), 3 = (i, j + 1). The index
# has corner 0 as its most significant bit, and a bit is set when the
# corner lies above the level. Saddles carry two alternatives, picked by
# whether the cell center lies above the level.
MARCHING_SQUARES_TABLE: t.List[t.Tuple[bool, t.Any]] = [
    (False, []),  # 0000
    (False, [((0, 3), (2, 3))]),  # 0001
    (False, [((1, 2), (2, 3))]),  # 0010
    (False, [((0, 3), (1, 2))]),  # 0011
    (False, [((0, 1), (1, 2))]),  # 0100
    (
        True,
        (
            [((0, 1), (1, 2)), ((0, 3), (2, 3))],
            [((0, 1), (0, 3)), ((1, 2), (2, 3))],
        ),
    ),  # 0101
    (False, [((0, 1), (2, 3))]),  # 0110
    (False, [((0, 1), (0, 3))]),  # 0111
    (False, [((0, 1), (0, 3))]),  # 1000
    (False, [((0, 1), (2, 3))]),  # 1001
    (
        True,
        (
            [((0, 1), (0, 3)), ((1, 2), (2, 3))],
            [((0, 1), (1, 2)), ((0, 3), (2, 3))],
        ),
    ),  # 1010
    (False, [((0, 1), (1, 2))]),  # 1011
    (False, [((0, 3), (1, 2))]),  # 1100
    (False, [((1, 2), (2, 3))]),  # 1101
    (False, [((0, 3), (2, 3))]),  # 1110
    (False, []),  # 1111
]

CORNER_OFFSETS = ((0, 0), (1, 0), (1, 1), (0, 1))

EdgeKey = t.Tuple[t.Tuple[int, int], t.Tuple[int, int]]


def values_to_index(values: t.Sequence[float]) -> int:
    n = 0
    for v in values:
        if v > 0:
            n += 1
        n = n << 1
    return n >> 1


def lerp_point(p0: np.ndarray, p1: np.ndarray, v0: float, v1: float):
    t = v0 / (v0 - v1)
    if t < 0:
        t = 0
    elif t > 1:
        t = 1
    return p0 * (1 - t) + t * p1


def _chain(
    segments: t.List[t.Tuple[EdgeKey, EdgeKey]],
    points: t.Dict[EdgeKey, np.ndarray],
) -> t.List[np.ndarray]:
    """
    Join segments which share a crossing point into polylines. Closed loops
    don't repeat their first point.
    """
    neighbours: t.Dict[EdgeKey, t.List[EdgeKey]] = {}
    for a, b in segments:
        neighbours.setdefault(a, []).append(b)
        neighbours.setdefault(b, []).append(a)

    visited: t.Set[EdgeKey] = set()
    loops = []
    for start in neighbours:
        if start in visited:
            continue

        # Open polylines are walked from one of their ends.
        ends = [
            key
            for key in _component(start, neighbours)
            if len(neighbours[key]) == 1
        ]
        current = ends[0] if ends else start

        path = [current]
        visited.add(current)
        while True:
            following = [i for i in neighbours[current] if i not in visited]
            if not following:
                break
            current = following[0]
            visited.add(current)
            path.append(current)

        loops.append(np.array([points[key] for key in path]))

    return loops


def _component(
    start: EdgeKey, neighbours: t.Dict[EdgeKey, t.List[EdgeKey]]
) -> t.List[EdgeKey]:
    seen = {start}
    stack = [start]
    while stack:
        for key in neighbours[stack.pop()]:
            if key not in seen:
                seen.add(key)
                stack.append(key)
    return list(seen)


def marching_squares(
    values: np.ndarray, xs: np.ndarray, ys: np.ndarray, level: float
) -> t.List[np.ndarray]:
    """
    Extract the contour ``values == level``.

    :param values:
        Samples shaped ``(len(xs), len(ys))``.
    :returns:
        Polylines of points, longest first.

    """
    shifted = np.asarray(values, dtype=float) - level
    nx, ny = shifted.shape

    segments: t.List[t.Tuple[EdgeKey, EdgeKey]] = []
    points: t.Dict[EdgeKey, np.ndarray] = {}

    for i, j in np.ndindex(nx - 1, ny - 1):
        corners = [(i + di, j + dj) for di, dj in CORNER_OFFSETS]
        samples = [shifted[c] for c in corners]

        sample_center, edges = MARCHING_SQUARES_TABLE[values_to_index(samples)]
        if not edges:
            continue
        if sample_center:
            edges = edges[int(np.mean(samples) > 0)]

        for edge_pair in edges:
            keys = []
            for i0, i1 in edge_pair:
                key: EdgeKey = tuple(sorted((corners[i0], corners[i1])))
                if key not in points:
                    c0, c1 = corners[i0], corners[i1]
                    points[key] = lerp_point(
                        np.array((xs[c0[0]], ys[c0[1]])),
                        np.array((xs[c1[0]], ys[c1[1]])),
                        samples[i0],
                        samples[i1],
                    )
                keys.append(key)
            segments.append((keys[0], keys[1]))

    loops = _chain(segments, points)
    loops.sort(key=len, reverse=True)
    return loops
