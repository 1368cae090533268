"""Mesh canonicalization: decimate, center, and fit into the unit box."""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import InvalidInputError
from .decimate import decimate_quadric
from .mesh import PartLabeledMesh, TriangleMesh

UNIT_BOX_LO = np.full(3, -0.5)
UNIT_BOX_HI = np.full(3, 0.5)


def fits_unit_box(mesh: TriangleMesh, tol: float = 1e-6) -> bool:
    lo, hi = mesh.bounds()
    return bool((lo >= UNIT_BOX_LO - tol).all() and (hi <= UNIT_BOX_HI + tol).all())


def _transfer_labels(original: PartLabeledMesh, new_vertices: np.ndarray) -> np.ndarray:
    """Nearest original vertex wins; exact distance ties go to the lowest label id."""
    tree = cKDTree(original.mesh.vertices)
    k = min(4, len(original.mesh.vertices))
    d, idx = tree.query(new_vertices, k=k)
    if k == 1:
        return original.part_of_vertex[idx]
    labels = original.part_of_vertex[idx]
    tied = d <= d[:, :1] * (1 + 1e-12) + 1e-15
    out = np.empty(len(new_vertices), dtype=np.int64)
    for r in range(len(new_vertices)):
        out[r] = labels[r][tied[r]].min()
    return out


def canonicalize_mesh(labeled: PartLabeledMesh, target_vertex_count: int = 1000) -> PartLabeledMesh:
    """Decimate to at most `target_vertex_count`, center at the origin, and
    anisotropically scale so the mesh fills the unit box along every
    non-degenerate axis. Part labels transfer to surviving vertices from
    their nearest original vertex.
    """
    if target_vertex_count < 4:
        raise InvalidInputError(f"target vertex count must be >= 4, got {target_vertex_count}")
    if len(labeled.mesh) == 0:
        raise InvalidInputError("empty mesh")

    if len(labeled.mesh) <= target_vertex_count:
        mesh = TriangleMesh(labeled.mesh.vertices.copy(), labeled.mesh.faces.copy())
        labels = labeled.part_of_vertex.copy()
    else:
        mesh, _ = decimate_quadric(labeled.mesh, target_vertex_count)
        labels = _transfer_labels(labeled, mesh.vertices)

    lo, hi = mesh.bounds()
    center = 0.5 * (lo + hi)
    extent = hi - lo
    scale = np.where(extent > 1e-12, 1.0 / np.maximum(extent, 1e-12), 1.0)
    verts = (mesh.vertices - center) * scale
    verts = np.clip(verts, UNIT_BOX_LO, UNIT_BOX_HI)

    names = {pid: name for pid, name in labeled.part_names.items() if pid in set(labels.tolist())}
    return PartLabeledMesh(TriangleMesh(verts, mesh.faces), labels, names)
