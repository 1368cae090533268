from .camera import Camera, project_perspective, project_perspective_torch
from .model import (
    JOINT_NAMES,
    N_JOINTS,
    PARENTS,
    SMPL_PART_NAMES,
    BodyModelEvaluator,
    SimpleBodyModel,
    make_evaluator,
)
from .refine import BodyParams, RefineConfig, keypoint_energy, refine_body

__all__ = [
    "BodyModelEvaluator",
    "BodyParams",
    "Camera",
    "JOINT_NAMES",
    "N_JOINTS",
    "PARENTS",
    "RefineConfig",
    "SMPL_PART_NAMES",
    "SimpleBodyModel",
    "keypoint_energy",
    "make_evaluator",
    "project_perspective",
    "project_perspective_torch",
    "refine_body",
]
