"""Quadric-error edge-collapse decimation."""
from __future__ import annotations

import heapq

import numpy as np

from ..errors import InvalidInputError
from .mesh import TriangleMesh


def _plane_quadric(a, b, c):
    n = np.cross(b - a, c - a)
    norm = np.linalg.norm(n)
    if norm < 1e-14:
        return np.zeros((4, 4))
    n = n / norm
    d = -np.dot(n, a)
    p = np.append(n, d)
    return np.outer(p, p)


def _optimal_position(q, vi, vj):
    a = q[:3, :3]
    b = -q[:3, 3]
    try:
        if abs(np.linalg.det(a)) > 1e-12:
            cand = [np.linalg.solve(a, b)]
        else:
            cand = []
    except np.linalg.LinAlgError:
        cand = []
    cand += [0.5 * (vi + vj), vi, vj]
    best, best_cost = None, np.inf
    for v in cand:
        h = np.append(v, 1.0)
        cost = float(h @ q @ h)
        if cost < best_cost:
            best, best_cost = v, cost
    return best, max(best_cost, 0.0)


def decimate_quadric(mesh: TriangleMesh, target_vertex_count: int) -> tuple[TriangleMesh, np.ndarray]:
    """Collapse lowest-cost edges until the vertex count reaches the target.

    Returns the decimated mesh and, for every output vertex, the index of the
    input vertex it descended from (used for attribute transfer). Collapses
    that would flip a surviving face normal are rejected.
    """
    if target_vertex_count < 4:
        raise InvalidInputError(f"target vertex count must be >= 4, got {target_vertex_count}")
    verts = mesh.vertices.copy()
    faces = [tuple(f) for f in mesh.remove_degenerate_faces().faces]
    n = len(verts)
    if n <= target_vertex_count:
        return TriangleMesh(verts, np.array(faces or np.zeros((0, 3)), dtype=np.int64)), np.arange(n)

    quadrics = [np.zeros((4, 4)) for _ in range(n)]
    vertex_faces: list[set[int]] = [set() for _ in range(n)]
    face_alive = [True] * len(faces)
    for fi, (i, j, k) in enumerate(faces):
        q = _plane_quadric(verts[i], verts[j], verts[k])
        for v in (i, j, k):
            quadrics[v] += q
            vertex_faces[v].add(fi)

    alive = np.ones(n, dtype=bool)
    source = np.arange(n)
    version = np.zeros(n, dtype=np.int64)

    def neighbors(v):
        out = set()
        for fi in vertex_faces[v]:
            if face_alive[fi]:
                out.update(faces[fi])
        out.discard(v)
        return out

    heap: list[tuple[float, int, int, int, int]] = []

    def push_edge(i, j):
        if i > j:
            i, j = j, i
        _, cost = _optimal_position(quadrics[i] + quadrics[j], verts[i], verts[j])
        heapq.heappush(heap, (cost, i, j, int(version[i]), int(version[j])))

    seen = set()
    for i, j, k in faces:
        for e in ((i, j), (j, k), (i, k)):
            e = (min(e), max(e))
            if e not in seen:
                seen.add(e)
                push_edge(*e)
    del seen

    def collapse_flips_face(i, j, new_pos):
        # Surviving faces around either endpoint must keep their orientation.
        for v in (i, j):
            for fi in vertex_faces[v]:
                if not face_alive[fi]:
                    continue
                f = faces[fi]
                if i in f and j in f:
                    continue
                tri_old = [verts[x] for x in f]
                tri_new = [new_pos if x in (i, j) else verts[x] for x in f]
                n_old = np.cross(tri_old[1] - tri_old[0], tri_old[2] - tri_old[0])
                n_new = np.cross(tri_new[1] - tri_new[0], tri_new[2] - tri_new[0])
                if np.dot(n_old, n_new) <= 0:
                    return True
        return False

    n_alive = n
    while n_alive > target_vertex_count and heap:
        cost, i, j, vi_ver, vj_ver = heapq.heappop(heap)
        if not (alive[i] and alive[j]):
            continue
        if version[i] != vi_ver or version[j] != vj_ver:
            continue
        q = quadrics[i] + quadrics[j]
        new_pos, _ = _optimal_position(q, verts[i], verts[j])
        if collapse_flips_face(i, j, new_pos):
            continue

        verts[i] = new_pos
        quadrics[i] = q
        alive[j] = False
        version[i] += 1
        version[j] += 1
        n_alive -= 1

        for fi in list(vertex_faces[j]):
            if not face_alive[fi]:
                continue
            f = faces[fi]
            if i in f:
                face_alive[fi] = False
                continue
            faces[fi] = tuple(i if x == j else x for x in f)
            vertex_faces[i].add(fi)
        vertex_faces[j] = set()

        for nb in neighbors(i):
            push_edge(i, nb)

    keep = np.flatnonzero(alive)
    remap = -np.ones(n, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    new_faces = []
    seen_faces = set()
    for fi, f in enumerate(faces):
        if not face_alive[fi]:
            continue
        g = tuple(remap[list(f)])
        if len(set(g)) < 3:
            continue
        key = tuple(sorted(g))
        if key in seen_faces:
            continue
        seen_faces.add(key)
        new_faces.append(g)
    out = TriangleMesh(verts[keep], np.array(new_faces or np.zeros((0, 3)), dtype=np.int64))
    out = out.remove_degenerate_faces()
    return out, source[keep]
