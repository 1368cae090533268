"""Body-model evaluator contract and the built-in capsule body.

Any evaluator maps (shape coefficients beta[10], pose theta[72] axis-angle)
to a part-labeled surface mesh plus 24 joints. The built-in model is a
kinematic tree of capsules with SMPL-style joint and part names; it exists
so fitting and tests run without any licensed body-model assets. Adapters
for real body models can implement the same protocol.
"""
from __future__ import annotations

from typing import Protocol

import numpy as np
import torch

from ..errors import InvalidInputError
from ..geometry.mesh import PartLabeledMesh, TriangleMesh
from ..torchgeo import rodrigues

JOINT_NAMES = [
    "pelvis", "left_hip", "right_hip", "spine1", "left_knee", "right_knee",
    "spine2", "left_ankle", "right_ankle", "spine3", "left_foot", "right_foot",
    "neck", "left_collar", "right_collar", "head", "left_shoulder",
    "right_shoulder", "left_elbow", "right_elbow", "left_wrist", "right_wrist",
    "left_hand", "right_hand",
]
PARENTS = [-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21]
N_JOINTS = 24

SMPL_PART_NAMES = [
    "hips", "leftUpLeg", "rightUpLeg", "spine", "leftLeg", "rightLeg",
    "spine1", "leftFoot", "rightFoot", "spine2", "leftToeBase", "rightToeBase",
    "neck", "leftShoulder", "rightShoulder", "head", "leftArm", "rightArm",
    "leftForeArm", "rightForeArm", "leftHand", "rightHand",
    "leftHandIndex1", "rightHandIndex1",
]


class BodyModelEvaluator(Protocol):
    """Deterministic map from (beta, theta) to a labeled mesh and 24 joints.

    `forward` is the differentiable torch path used by the optimizers;
    `evaluate` is the numpy convenience wrapper.
    """

    def forward(self, betas: torch.Tensor, pose: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]: ...

    def evaluate(self, betas: np.ndarray, pose: np.ndarray) -> tuple[PartLabeledMesh, np.ndarray]: ...


# Canonical joint offsets from the parent joint (T-pose, y up, z forward).
_BASE_OFFSETS = np.array([
    [0.000, 0.000, 0.000],   # pelvis (root)
    [+0.085, -0.060, 0.000], # left_hip
    [-0.085, -0.060, 0.000], # right_hip
    [0.000, +0.120, 0.000],  # spine1
    [0.000, -0.410, 0.000],  # left_knee
    [0.000, -0.410, 0.000],  # right_knee
    [0.000, +0.140, 0.000],  # spine2
    [0.000, -0.380, 0.000],  # left_ankle
    [0.000, -0.380, 0.000],  # right_ankle
    [0.000, +0.140, 0.000],  # spine3
    [+0.015, -0.050, +0.120],# left_foot
    [-0.015, -0.050, +0.120],# right_foot
    [0.000, +0.120, 0.000],  # neck
    [+0.060, +0.070, 0.000], # left_collar
    [-0.060, +0.070, 0.000], # right_collar
    [0.000, +0.100, 0.000],  # head
    [+0.110, 0.000, 0.000],  # left_shoulder
    [-0.110, 0.000, 0.000],  # right_shoulder
    [+0.260, 0.000, 0.000],  # left_elbow
    [-0.260, 0.000, 0.000],  # right_elbow
    [+0.230, 0.000, 0.000],  # left_wrist
    [-0.230, 0.000, 0.000],  # right_wrist
    [+0.080, 0.000, 0.000],  # left_hand
    [-0.080, 0.000, 0.000],  # right_hand
    [0.000, +0.110, 0.000],  # head_top (virtual, parent head)
])
_VIRTUAL_PARENTS = [15]
_N_ALL = N_JOINTS + len(_VIRTUAL_PARENTS)
_ALL_PARENTS = PARENTS + _VIRTUAL_PARENTS

# Shape coefficients scale groups of joint offsets (and capsule radii).
_LEG_JOINTS = [1, 2, 4, 5, 7, 8, 10, 11]
_TORSO_JOINTS = [3, 6, 9, 12]
_ARM_JOINTS = [18, 19, 20, 21, 22, 23]
_SHOULDER_JOINTS = [13, 14, 16, 17]
_HEAD_JOINTS = [15, 24]

# (proximal joint, distal joint, radius, part name)
_CAPSULES = [
    (0, 3, 0.130, "hips"),
    (3, 6, 0.120, "spine"),
    (6, 9, 0.115, "spine1"),
    (9, 12, 0.105, "spine2"),
    (12, 15, 0.050, "neck"),
    (15, 24, 0.090, "head"),
    (1, 4, 0.075, "leftUpLeg"),
    (2, 5, 0.075, "rightUpLeg"),
    (4, 7, 0.055, "leftLeg"),
    (5, 8, 0.055, "rightLeg"),
    (7, 10, 0.042, "leftFoot"),
    (8, 11, 0.042, "rightFoot"),
    (13, 16, 0.052, "leftShoulder"),
    (14, 17, 0.052, "rightShoulder"),
    (16, 18, 0.046, "leftArm"),
    (17, 19, 0.046, "rightArm"),
    (18, 20, 0.040, "leftForeArm"),
    (19, 21, 0.040, "rightForeArm"),
    (20, 22, 0.036, "leftHand"),
    (21, 23, 0.036, "rightHand"),
]

_N_SEGMENTS = 10
_N_CAP_RINGS = 2


def _capsule_template(n_seg=_N_SEGMENTS, n_cap=_N_CAP_RINGS):
    """Per-vertex (t, radial, axial, angle) parameters plus faces.

    A vertex sits at a + t*(b-a) + r*(radial*dir(angle) + axial*u) for bone
    axis u. Rings run bottom cap, tube ends, top cap, then the two poles.
    """
    params = []
    rings = []
    for i in range(n_cap, 0, -1):
        phi = 0.5 * np.pi * i / (n_cap + 1)
        rings.append((0.0, np.cos(phi), -np.sin(phi)))
    rings.append((0.0, 1.0, 0.0))
    rings.append((1.0, 1.0, 0.0))
    for i in range(1, n_cap + 1):
        phi = 0.5 * np.pi * i / (n_cap + 1)
        rings.append((1.0, np.cos(phi), np.sin(phi)))
    for t, radial, axial in rings:
        for s in range(n_seg):
            params.append((t, radial, axial, 2.0 * np.pi * s / n_seg))
    bottom_pole = len(params)
    params.append((0.0, 0.0, -1.0, 0.0))
    top_pole = len(params)
    params.append((1.0, 0.0, 1.0, 0.0))

    faces = []
    n_rings = len(rings)
    for r in range(n_rings - 1):
        for s in range(n_seg):
            a = r * n_seg + s
            b = r * n_seg + (s + 1) % n_seg
            c = (r + 1) * n_seg + s
            d = (r + 1) * n_seg + (s + 1) % n_seg
            faces.append([a, c, b])
            faces.append([b, c, d])
    for s in range(n_seg):
        faces.append([bottom_pole, s, (s + 1) % n_seg])
        top = (n_rings - 1) * n_seg
        faces.append([top_pole, top + (s + 1) % n_seg, top + s])
    return np.array(params), np.array(faces, dtype=np.int64)


class SimpleBodyModel:
    """Capsule-skeleton body: differentiable, deterministic, asset-free."""

    joint_names = JOINT_NAMES
    parents = PARENTS
    n_joints = N_JOINTS

    def __init__(self):
        params, faces = _capsule_template()
        verts_per_capsule = len(params)
        self._cap_params = torch.tensor(params, dtype=torch.float64)
        self._capsules = _CAPSULES
        self.part_names = {i: cap[3] for i, cap in enumerate(_CAPSULES)}

        all_faces = []
        labels = []
        for ci in range(len(_CAPSULES)):
            all_faces.append(faces + ci * verts_per_capsule)
            labels.extend([ci] * verts_per_capsule)
        self.faces = np.concatenate(all_faces)
        self._faces_t = torch.tensor(self.faces, dtype=torch.int64)
        self.part_of_vertex = np.array(labels, dtype=np.int64)
        self._verts_per_capsule = verts_per_capsule

        self._base_offsets = torch.tensor(_BASE_OFFSETS, dtype=torch.float64)
        # Orthonormal frames per capsule from the canonical bone direction.
        frames = []
        for a_idx, b_idx, _, _ in _CAPSULES:
            axis = self._canonical_joint(b_idx) - self._canonical_joint(a_idx)
            u = axis / np.linalg.norm(axis)
            ref = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 0.0, 1.0])
            v = np.cross(u, ref)
            v /= np.linalg.norm(v)
            w = np.cross(u, v)
            frames.append(np.stack([u, v, w]))
        self._frames = torch.tensor(np.array(frames), dtype=torch.float64)

    def _canonical_joint(self, idx: int) -> np.ndarray:
        pos = np.zeros(3)
        while idx >= 0:
            pos = pos + _BASE_OFFSETS[idx]
            idx = _ALL_PARENTS[idx]
        return pos

    def _offset_scales(self, betas: torch.Tensor) -> torch.Tensor:
        s = torch.ones(_N_ALL, dtype=betas.dtype)
        height = 1.0 + 0.05 * betas[0]
        s = s * height
        groups = [
            (_LEG_JOINTS, betas[1]),
            (_TORSO_JOINTS, betas[2]),
            (_ARM_JOINTS, betas[3]),
            (_SHOULDER_JOINTS, betas[4]),
            (_HEAD_JOINTS, betas[5]),
        ]
        for idx, coeff in groups:
            mask = torch.zeros(_N_ALL, dtype=betas.dtype)
            mask[idx] = 1.0
            s = s * (1.0 + 0.05 * coeff * mask)
        return s

    def _radius_scale(self, betas: torch.Tensor) -> torch.Tensor:
        return 1.0 + 0.05 * betas[6]

    def forward(self, betas: torch.Tensor, pose: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Vertices (n, 3) and joints (24, 3) in the body frame, float64."""
        if betas.shape != (10,) or pose.shape != (72,):
            raise InvalidInputError(f"expected betas (10,) and pose (72,), got {tuple(betas.shape)}, {tuple(pose.shape)}")
        betas = betas.to(torch.float64)
        pose = pose.to(torch.float64)

        scales = self._offset_scales(betas)
        offsets = self._base_offsets * scales[:, None]
        local_rot = rodrigues(pose.reshape(N_JOINTS, 3))

        glob_rot = [None] * _N_ALL
        glob_pos = [None] * _N_ALL
        for j in range(_N_ALL):
            p = _ALL_PARENTS[j]
            rot_j = local_rot[j] if j < N_JOINTS else torch.eye(3, dtype=betas.dtype)
            if p < 0:
                glob_rot[j] = rot_j
                glob_pos[j] = offsets[j]
            else:
                glob_rot[j] = glob_rot[p] @ rot_j
                glob_pos[j] = glob_pos[p] + glob_rot[p] @ offsets[j]
        joints = torch.stack(glob_pos[:N_JOINTS])

        r_scale = self._radius_scale(betas)
        chunks = []
        t_par = self._cap_params[:, 0:1]
        radial = self._cap_params[:, 1:2]
        axial = self._cap_params[:, 2:3]
        ang = self._cap_params[:, 3]
        cos_a = torch.cos(ang)[:, None]
        sin_a = torch.sin(ang)[:, None]
        for ci, (a_idx, b_idx, radius, _) in enumerate(self._capsules):
            rot = glob_rot[a_idx]
            a = glob_pos[a_idx]
            b = glob_pos[b_idx]
            u = rot @ self._frames[ci, 0]
            v = rot @ self._frames[ci, 1]
            w = rot @ self._frames[ci, 2]
            r = radius * r_scale
            pts = (
                a[None, :]
                + t_par * (b - a)[None, :]
                + r * (radial * (cos_a * v[None, :] + sin_a * w[None, :]) + axial * u[None, :])
            )
            chunks.append(pts)
        return torch.cat(chunks), joints

    def evaluate(self, betas, pose) -> tuple[PartLabeledMesh, np.ndarray]:
        with torch.no_grad():
            verts, joints = self.forward(
                torch.as_tensor(np.asarray(betas, dtype=np.float64)),
                torch.as_tensor(np.asarray(pose, dtype=np.float64)),
            )
        mesh = TriangleMesh(verts.numpy(), self.faces.copy())
        labeled = PartLabeledMesh(mesh, self.part_of_vertex.copy(), dict(self.part_names))
        return labeled, joints.numpy()


def make_evaluator(name: str = "builtin") -> SimpleBodyModel:
    if name != "builtin":
        raise InvalidInputError(f"unknown body evaluator {name!r} (only 'builtin' ships)")
    return SimpleBodyModel()
