"""
Plain text mesh dumps::

    nodes N
    x y
    ...
    triangles M
    i j k
    ...
    boundary B
    i j
    ...
    values N
    v            (or "re im" for complex fields)
    ...

The ``values`` section is optional. Floats are written with ``repr``, so
a dump loads back bit exactly.
"""
from __future__ import annotations
import os
import typing as t

import numpy as np

from magsteklov.meshing.exceptions import DegenerateMesh
from magsteklov.meshing.mesh import Mesh


def _section(lines: t.Iterator[str], name: str) -> int:
    header = next(lines).split()
    if len(header) != 2 or header[0] != name:
        raise DegenerateMesh(f"Expected a '{name} N' line, got {header}.")
    return int(header[1])


def dump_mesh(
    mesh: Mesh,
    path: t.Union[str, os.PathLike],
    values: t.Optional[np.ndarray] = None,
) -> None:
    lines = [f"nodes {mesh.n_nodes}"]
    lines.extend(f"{x!r} {y!r}" for x, y in mesh.nodes.tolist())
    lines.append(f"triangles {mesh.n_triangles}")
    lines.extend(
        " ".join(str(i) for i in row) for row in mesh.triangles.tolist()
    )
    lines.append(f"boundary {mesh.boundary_edges.shape[0]}")
    lines.extend(f"{a} {b}" for a, b in mesh.boundary_edges.tolist())

    if values is not None:
        if values.shape[0] != mesh.n_nodes:
            raise ValueError("There must be one value per node.")
        lines.append(f"values {values.shape[0]}")
        if np.iscomplexobj(values):
            lines.extend(f"{v.real!r} {v.imag!r}" for v in values.tolist())
        else:
            lines.extend(repr(v) for v in values.tolist())

    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_mesh(
    path: t.Union[str, os.PathLike]
) -> t.Tuple[Mesh, t.Optional[np.ndarray]]:
    """
    Read a dump back. The loaded mesh doesn't know its domain, so it can't
    be refined with boundary projection.

    :returns:
        The mesh, and the values section if there is one.

    """
    with open(path) as f:
        lines = iter([i for i in f.read().splitlines() if i.strip()])

    n_nodes = _section(lines, "nodes")
    nodes = np.array(
        [[float(i) for i in next(lines).split()] for _ in range(n_nodes)]
    ).reshape(n_nodes, 2)

    n_triangles = _section(lines, "triangles")
    triangles = np.array(
        [[int(i) for i in next(lines).split()] for _ in range(n_triangles)],
        dtype=int,
    ).reshape(n_triangles, 3)

    n_edges = _section(lines, "boundary")
    boundary_edges = np.array(
        [[int(i) for i in next(lines).split()] for _ in range(n_edges)],
        dtype=int,
    ).reshape(n_edges, 2)

    values = None
    try:
        n_values = _section(lines, "values")
    except StopIteration:
        pass
    else:
        rows = [
            [float(i) for i in next(lines).split()] for _ in range(n_values)
        ]
        array = np.array(rows)
        values = array[:, 0]
        if array.shape[1] == 2:
            values = values + 1j * array[:, 1]

    flags = np.zeros(n_nodes, dtype=bool)
    flags[boundary_edges.ravel()] = True

    lengths = np.linalg.norm(
        nodes[boundary_edges[:, 1]] - nodes[boundary_edges[:, 0]], axis=1
    )
    mesh = Mesh(
        nodes=nodes,
        triangles=triangles,
        boundary_edges=boundary_edges,
        boundary=flags,
        h=float(lengths.max()) if n_edges else 0.0,
        boundary_parameters=np.full(n_nodes, np.nan),
    )
    return mesh, values
