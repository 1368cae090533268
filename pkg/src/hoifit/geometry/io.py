"""ASCII OBJ/PLY mesh I/O plus the `<mesh>.parts` label sidecar.

The sidecar starts with `# <id> <name>` header lines, followed by one
integer label per vertex line, in vertex order.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import InvalidInputError
from .mesh import PartLabeledMesh, TriangleMesh


def load_obj(path) -> TriangleMesh:
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = [int(tok.split("/")[0]) - 1 for tok in parts[1:]]
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    if not verts:
        raise InvalidInputError(f"no vertices in {path}")
    return TriangleMesh(np.array(verts), np.array(faces or np.zeros((0, 3)), dtype=np.int64))


def save_obj(path, mesh: TriangleMesh) -> None:
    lines = [f"v {v[0]!r} {v[1]!r} {v[2]!r}" for v in mesh.vertices]
    lines += [f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}" for f in mesh.faces]
    Path(path).write_text("\n".join(lines) + "\n")


def load_ply(path) -> TriangleMesh:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "ply":
        raise InvalidInputError(f"{path} is not a PLY file")
    n_verts = n_faces = 0
    body_at = None
    for i, line in enumerate(lines[1:], start=1):
        toks = line.split()
        if toks[:2] == ["element", "vertex"]:
            n_verts = int(toks[2])
        elif toks[:2] == ["element", "face"]:
            n_faces = int(toks[2])
        elif toks[:1] == ["format"] and "ascii" not in line:
            raise InvalidInputError("only ASCII PLY is supported")
        elif toks[:1] == ["end_header"]:
            body_at = i + 1
            break
    if body_at is None or n_verts == 0:
        raise InvalidInputError(f"malformed PLY header in {path}")
    verts = np.array(
        [[float(x) for x in lines[body_at + i].split()[:3]] for i in range(n_verts)]
    )
    faces = []
    for i in range(n_faces):
        toks = lines[body_at + n_verts + i].split()
        count = int(toks[0])
        idx = [int(t) for t in toks[1 : 1 + count]]
        for k in range(1, count - 1):
            faces.append([idx[0], idx[k], idx[k + 1]])
    return TriangleMesh(verts, np.array(faces or np.zeros((0, 3)), dtype=np.int64))


def save_ply(path, mesh: TriangleMesh) -> None:
    header = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(mesh)}",
        "property double x",
        "property double y",
        "property double z",
        f"element face {mesh.n_faces}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    body = [f"{v[0]!r} {v[1]!r} {v[2]!r}" for v in mesh.vertices]
    body += [f"3 {f[0]} {f[1]} {f[2]}" for f in mesh.faces]
    Path(path).write_text("\n".join(header + body) + "\n")


def load_mesh(path) -> TriangleMesh:
    path = Path(path)
    if path.suffix.lower() == ".obj":
        return load_obj(path)
    if path.suffix.lower() == ".ply":
        return load_ply(path)
    raise InvalidInputError(f"unsupported mesh format: {path.suffix}")


def save_mesh(path, mesh: TriangleMesh) -> None:
    path = Path(path)
    if path.suffix.lower() == ".obj":
        save_obj(path, mesh)
    elif path.suffix.lower() == ".ply":
        save_ply(path, mesh)
    else:
        raise InvalidInputError(f"unsupported mesh format: {path.suffix}")


def parts_sidecar_path(mesh_path) -> Path:
    return Path(str(mesh_path) + ".parts")


def save_parts(path, labeled: PartLabeledMesh) -> None:
    lines = [f"# {pid} {name}" for pid, name in sorted(labeled.part_names.items())]
    lines += [str(int(l)) for l in labeled.part_of_vertex]
    Path(path).write_text("\n".join(lines) + "\n")


def load_parts(path, mesh: TriangleMesh) -> PartLabeledMesh:
    names: dict[int, str] = {}
    labels: list[int] = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            toks = line[1:].split(None, 1)
            if len(toks) != 2:
                raise InvalidInputError(f"malformed part header line: {line!r}")
            names[int(toks[0])] = toks[1].strip()
        else:
            labels.append(int(line))
    if len(labels) != len(mesh):
        raise InvalidInputError(
            f"{path}: {len(labels)} labels for {len(mesh)} vertices"
        )
    return PartLabeledMesh(mesh, np.array(labels, dtype=np.int64), names)


def load_labeled_mesh(mesh_path) -> PartLabeledMesh:
    mesh = load_mesh(mesh_path)
    return load_parts(parts_sidecar_path(mesh_path), mesh)


def save_labeled_mesh(mesh_path, labeled: PartLabeledMesh) -> None:
    save_mesh(mesh_path, labeled.mesh)
    save_parts(parts_sidecar_path(mesh_path), labeled)
