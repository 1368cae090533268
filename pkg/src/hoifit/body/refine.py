"""Keypoint-driven body refinement over a pluggable evaluator.

Minimizes the confidence-weighted squared pixel error between projected
model joints and detected 2D keypoints, with quadratic pulls keeping shape
and pose near the regressor initialization.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from ..errors import BehindCameraError, InvalidInputError, OptimizationFailureError
from ..optim import Adam
from .camera import Camera, project_perspective_torch
from .model import BodyModelEvaluator


@dataclass
class BodyParams:
    betas: np.ndarray
    pose: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        self.betas = np.asarray(self.betas, dtype=np.float64).reshape(10)
        self.pose = np.asarray(self.pose, dtype=np.float64).reshape(72)
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(3)
        for name, arr in (("betas", self.betas), ("pose", self.pose), ("translation", self.translation)):
            if not np.isfinite(arr).all():
                raise InvalidInputError(f"{name} contains non-finite values")

    def copy(self) -> "BodyParams":
        return BodyParams(self.betas.copy(), self.pose.copy(), self.translation.copy())

    def to_dict(self) -> dict:
        return {
            "betas": self.betas.tolist(),
            "pose": self.pose.tolist(),
            "translation": self.translation.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BodyParams":
        return cls(d["betas"], d["pose"], d["translation"])


@dataclass
class RefineConfig:
    iterations: int = 200
    lr: float = 1e-2
    pose_prior_weight: float = 1e-3
    shape_prior_weight: float = 1e-3
    # After `patience` steps without improving on the incumbent, the state
    # reverts to the incumbent and the rate decays.
    patience: int = 25
    lr_decay: float = 0.5
    min_lr: float = 1e-7


def _keypoint_energy_torch(betas, pose, translation, evaluator, kp2d, conf, camera,
                           joint_indices=None) -> torch.Tensor:
    _, joints = evaluator.forward(betas, pose)
    joints = joints + translation
    if joint_indices is not None:
        joints = joints[joint_indices]
    if (joints[:, 2].detach() <= 0).any():
        raise BehindCameraError("a model joint is behind the camera")
    proj = project_perspective_torch(joints, camera)
    res = ((proj - kp2d) ** 2).sum(dim=1)
    return (conf * res).sum()


def keypoint_energy(params: BodyParams, evaluator: BodyModelEvaluator,
                    keypoints2d: np.ndarray, confidences: np.ndarray,
                    camera: Camera, joint_indices=None) -> float:
    """Sum over joints of confidence * squared pixel residual."""
    kp = np.asarray(keypoints2d, dtype=np.float64)
    conf = np.asarray(confidences, dtype=np.float64)
    n_expected = evaluator.n_joints if joint_indices is None else len(joint_indices)
    if kp.shape != (n_expected, 2) or conf.shape != (n_expected,):
        raise InvalidInputError(
            f"expected {n_expected} keypoints with confidences, got {kp.shape}, {conf.shape}"
        )
    e = _keypoint_energy_torch(
        torch.as_tensor(params.betas), torch.as_tensor(params.pose),
        torch.as_tensor(params.translation), evaluator,
        torch.as_tensor(kp), torch.as_tensor(conf), camera,
        joint_indices=joint_indices,
    )
    return float(e)


def refine_body(init: BodyParams, evaluator: BodyModelEvaluator,
                keypoints2d, confidences, camera: Camera,
                config: RefineConfig | None = None,
                joint_indices=None) -> tuple[BodyParams, list[float]]:
    """Adam descent on keypoint energy plus init-anchored priors.

    Adam runs freely, but the incumbent (best-so-far) parameters are what
    the search accepts: when `patience` consecutive steps fail to improve on
    the incumbent, the state reverts to it and the learning rate decays.
    Returns the incumbent parameters and the incumbent-energy trace (one
    entry per iteration plus the initial energy, non-increasing). Raises
    OptimizationFailureError on non-finite energy, attaching the incumbent.
    """
    config = config or RefineConfig()
    kp = torch.as_tensor(np.asarray(keypoints2d, dtype=np.float64))
    conf = torch.as_tensor(np.asarray(confidences, dtype=np.float64))

    betas = torch.tensor(init.betas, requires_grad=True)
    pose = torch.tensor(init.pose, requires_grad=True)
    trans = torch.tensor(init.translation, requires_grad=True)
    betas0 = torch.tensor(init.betas)
    pose0 = torch.tensor(init.pose)

    def total_energy():
        e = _keypoint_energy_torch(betas, pose, trans, evaluator, kp, conf, camera, joint_indices)
        e = e + config.pose_prior_weight * ((pose - pose0) ** 2).sum()
        e = e + config.shape_prior_weight * ((betas - betas0) ** 2).sum()
        return e

    params = [betas, pose, trans]

    def params_of(values) -> BodyParams:
        return BodyParams(*[v.detach().numpy().copy() for v in values])

    opt = Adam(params, lr=config.lr)
    energy = total_energy()
    if not torch.isfinite(energy):
        raise OptimizationFailureError("initial energy is not finite", last_state=init.copy())

    best = float(energy.detach())
    best_params = [p.detach().clone() for p in params]
    trace = [best]
    stale = 0

    for _ in range(config.iterations):
        opt.zero_grad()
        energy.backward()
        opt.step()
        energy = total_energy()
        if not torch.isfinite(energy):
            raise OptimizationFailureError(
                "energy became non-finite during refinement", last_state=params_of(best_params)
            )
        value = float(energy.detach())
        if value < best:
            best = value
            best_params = [p.detach().clone() for p in params]
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                with torch.no_grad():
                    for p, s in zip(params, best_params):
                        p.copy_(s)
                opt.reset_moments()
                opt.lr *= config.lr_decay
                stale = 0
                energy = total_energy()
                if opt.lr < config.min_lr:
                    trace.append(best)
                    break
        trace.append(best)

    with torch.no_grad():
        for p, s in zip(params, best_params):
            p.copy_(s)
    return params_of(best_params), trace
