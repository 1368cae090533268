"""Triangle meshes with optional per-vertex semantic part labels.

Vertices are float64 arrays in meters. Faces index vertices counter-clockwise
when viewed from outside, so face normals point outward for closed meshes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateNormalError, InvalidInputError

_AREA_EPS = 1e-14


def _as_vertices(arr) -> np.ndarray:
    v = np.asarray(arr, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 3:
        raise InvalidInputError(f"vertices must be (n, 3), got {v.shape}")
    if not np.isfinite(v).all():
        raise InvalidInputError("vertices contain non-finite values")
    return v


def _as_faces(arr, n_vertices: int) -> np.ndarray:
    f = np.asarray(arr, dtype=np.int64)
    if f.size == 0:
        return f.reshape(0, 3)
    if f.ndim != 2 or f.shape[1] != 3:
        raise InvalidInputError(f"faces must be (m, 3), got {f.shape}")
    if f.min() < 0 or f.max() >= n_vertices:
        raise InvalidInputError("face index out of range")
    return f


@dataclass
class TriangleMesh:
    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        self.vertices = _as_vertices(self.vertices)
        if len(self.vertices) == 0:
            raise InvalidInputError("mesh has no vertices")
        self.faces = _as_faces(self.faces, len(self.vertices))

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def face_corners(self):
        v = self.vertices
        f = self.faces
        return v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]

    def face_normals(self, normalize: bool = True) -> np.ndarray:
        """Cross-product face normals; unnormalized length is twice the area."""
        a, b, c = self.face_corners()
        n = np.cross(b - a, c - a)
        if not normalize:
            return n
        lens = np.linalg.norm(n, axis=1, keepdims=True)
        return n / np.maximum(lens, _AREA_EPS)

    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_normals(normalize=False), axis=1)

    def vertex_normals(self) -> np.ndarray:
        """Area-weighted vertex normals, unit length (zero rows stay zero)."""
        weighted = self.face_normals(normalize=False)
        acc = np.zeros_like(self.vertices)
        for k in range(3):
            np.add.at(acc, self.faces[:, k], weighted)
        lens = np.linalg.norm(acc, axis=1, keepdims=True)
        return np.divide(acc, lens, out=np.zeros_like(acc), where=lens > _AREA_EPS)

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def remove_degenerate_faces(self, area_eps: float = _AREA_EPS) -> "TriangleMesh":
        """Drop faces with repeated indices or (near) zero area."""
        f = self.faces
        distinct = (f[:, 0] != f[:, 1]) & (f[:, 1] != f[:, 2]) & (f[:, 0] != f[:, 2])
        keep = distinct & (self.face_areas() > area_eps)
        return TriangleMesh(self.vertices.copy(), f[keep])

    def is_closed(self) -> bool:
        """True when every edge is shared by exactly two faces."""
        if len(self.faces) == 0:
            return False
        edges = np.concatenate(
            [self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]
        )
        edges = np.sort(edges, axis=1)
        _, counts = np.unique(edges, axis=0, return_counts=True)
        return bool((counts == 2).all())

    def transformed(self, matrix: np.ndarray) -> "TriangleMesh":
        """Apply a 4x4 homogeneous transform."""
        v = self.vertices @ matrix[:3, :3].T + matrix[:3, 3]
        return TriangleMesh(v, self.faces.copy())


@dataclass
class PartLabeledMesh:
    """A mesh plus one semantic part label per vertex."""

    mesh: TriangleMesh
    part_of_vertex: np.ndarray
    part_names: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        labels = np.asarray(self.part_of_vertex, dtype=np.int64)
        if labels.shape != (len(self.mesh),):
            raise InvalidInputError(
                f"need one label per vertex, got {labels.shape} for {len(self.mesh)} vertices"
            )
        self.part_of_vertex = labels
        present = set(np.unique(labels).tolist())
        missing = present - set(self.part_names)
        if missing:
            raise InvalidInputError(f"unnamed part ids: {sorted(missing)}")
        for pid in self.part_names:
            if pid not in present:
                raise InvalidInputError(f"part {pid} ({self.part_names[pid]}) has no vertices")

    @property
    def vertices(self) -> np.ndarray:
        return self.mesh.vertices

    @property
    def faces(self) -> np.ndarray:
        return self.mesh.faces

    def part_id(self, name: str) -> int:
        for pid, pname in self.part_names.items():
            if pname == name:
                return pid
        raise KeyError(name)

    def has_part(self, name: str) -> bool:
        return name in self.part_names.values()

    def part_vertex_indices(self, part) -> np.ndarray:
        pid = self.part_id(part) if isinstance(part, str) else int(part)
        idx = np.flatnonzero(self.part_of_vertex == pid)
        if idx.size == 0:
            raise InvalidInputError(f"part {part!r} has no vertices")
        return idx

    def part_vertices(self, part) -> np.ndarray:
        return self.mesh.vertices[self.part_vertex_indices(part)]

    def part_face_mask(self, part) -> np.ndarray:
        """Faces whose three corners all carry the part label."""
        pid = self.part_id(part) if isinstance(part, str) else int(part)
        lab = self.part_of_vertex[self.mesh.faces]
        return (lab == pid).all(axis=1)

    def with_mesh(self, mesh: TriangleMesh) -> "PartLabeledMesh":
        return PartLabeledMesh(mesh, self.part_of_vertex.copy(), dict(self.part_names))


def single_part_mesh(mesh: TriangleMesh, name: str = "all") -> PartLabeledMesh:
    return PartLabeledMesh(mesh, np.zeros(len(mesh), dtype=np.int64), {0: name})


def part_normal_stats(labeled: PartLabeledMesh, part):
    """Area-weighted mean normal of a part and its coherence in [0, 1].

    Coherence is |sum(area * n)| / sum(area): 1 for a plane, ~0 when the
    part's normals cancel (e.g. a full closed tube). Falls back to vertex
    normals when no face lies fully inside the part.
    """
    face_mask = labeled.part_face_mask(part)
    if face_mask.any():
        weighted = labeled.mesh.face_normals(normalize=False)[face_mask]
        total_weight = np.linalg.norm(weighted, axis=1).sum()
        mean = weighted.sum(axis=0)
    else:
        vn = labeled.mesh.vertex_normals()[labeled.part_vertex_indices(part)]
        total_weight = float(len(vn))
        mean = vn.sum(axis=0)
    norm = np.linalg.norm(mean)
    if total_weight <= _AREA_EPS:
        return None, 0.0
    coherence = float(norm / total_weight)
    if norm <= 1e-12:
        return None, 0.0
    return mean / norm, coherence


def part_mean_normal(labeled: PartLabeledMesh, part) -> np.ndarray:
    """Unit mean normal of a part; raises when the mean cancels to zero."""
    normal, coherence = part_normal_stats(labeled, part)
    if normal is None or coherence < 1e-6:
        raise DegenerateNormalError(f"part {part!r} has a degenerate mean normal")
    return normal
