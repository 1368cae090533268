"""Scene state for the joint optimization: camera, humans, objects, contacts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..body.camera import Camera
from ..errors import InvalidInputError, MissingPriorError
from ..geometry.mesh import PartLabeledMesh
from ..geometry.sdf import SdfGrid, compute_sdf_grid
from ..geometry.transforms import RigidSimTransform
from ..priors.queries import InteractionMap


@dataclass
class HumanInstance:
    """A reconstructed person in the camera frame.

    `scale` multiplies vertices about `root` (the pelvis), which keeps feet
    grounded better than centroid scaling. The body SDF is rebuilt whenever
    the scale drifts past the rebuild threshold.
    """

    mesh: PartLabeledMesh
    root: np.ndarray
    scale: float = 1.0
    scale_prior: float | None = 1.0
    sdf: SdfGrid | None = None
    sdf_scale: float | None = None

    def __post_init__(self):
        self.root = np.asarray(self.root, dtype=np.float64).reshape(3)
        if not self.scale > 0:
            raise InvalidInputError(f"human scale must be positive, got {self.scale}")

    def scaled_vertices(self, scale: float | None = None) -> np.ndarray:
        s = self.scale if scale is None else scale
        return self.root + s * (self.mesh.vertices - self.root)

    def scaled_mesh(self, scale: float | None = None) -> PartLabeledMesh:
        from ..geometry.mesh import TriangleMesh

        mesh = TriangleMesh(self.scaled_vertices(scale), self.mesh.faces.copy())
        return self.mesh.with_mesh(mesh)

    def ensure_sdf(self, resolution: int = 8, rebuild_rel_change: float = 0.01) -> SdfGrid:
        stale = (
            self.sdf is None
            or self.sdf_scale is None
            or abs(self.scale - self.sdf_scale) > rebuild_rel_change * self.sdf_scale
        )
        if stale:
            self.sdf = compute_sdf_grid(self.scaled_mesh().mesh, resolution, padding=0.10)
            self.sdf_scale = self.scale
        return self.sdf


@dataclass
class ObjectInstance:
    """A retrieved exemplar with its rigid-similarity placement and mask."""

    exemplar: PartLabeledMesh
    transform: RigidSimTransform
    category: str
    mask: np.ndarray
    scale_prior: float | None = None

    def __post_init__(self):
        self.mask = np.asarray(self.mask).astype(bool)
        if self.mask.ndim != 2:
            raise InvalidInputError(f"mask must be 2D, got shape {self.mask.shape}")

    def world_vertices(self) -> np.ndarray:
        return self.transform.apply(self.exemplar.mesh.vertices)

    def require_scale_prior(self) -> float:
        if self.scale_prior is None:
            raise MissingPriorError(f"no scale prior for object category {self.category!r}")
        return float(self.scale_prior)


@dataclass
class SceneState:
    camera: Camera
    humans: list[HumanInstance]
    objects: list[ObjectInstance]
    # (human index, object index) -> normalized interaction map
    interactions: dict[tuple[int, int], InteractionMap] = field(default_factory=dict)

    def __post_init__(self):
        for (h, o) in self.interactions:
            if not (0 <= h < len(self.humans) and 0 <= o < len(self.objects)):
                raise InvalidInputError(f"interaction references missing instance ({h}, {o})")


@dataclass(frozen=True)
class LossBreakdown:
    """Unweighted loss terms plus the weighted total."""

    contact: float
    normal: float
    penetration: float
    scale: float
    reprojection: float
    total: float

    def as_row(self) -> list[float]:
        return [self.contact, self.normal, self.penetration, self.scale, self.reprojection, self.total]

    FIELDS = ("contact", "normal", "penetration", "scale", "reprojection", "total")


@dataclass
class OptimizeConfig:
    steps: int = 500
    lr: float = 2e-3
    lambda_contact: float = 1.0
    lambda_normal: float = 0.01
    lambda_penetration: float = 0.01
    lambda_scale: float = 0.01
    lambda_reprojection: float = 0.0005
    # Contact indicator: active when cos(part normals) is below this bound,
    # or when either part normal is too incoherent to be trusted.
    contact_normal_cos_max: float = 0.0
    normal_coherence_min: float = 0.2
    sdf_resolution: int = 8
    sdf_rebuild_rel_change: float = 0.01

    @property
    def lambdas(self) -> tuple[float, float, float, float]:
        return (
            self.lambda_normal,
            self.lambda_penetration,
            self.lambda_scale,
            self.lambda_reprojection,
        )


@dataclass
class OptimizeResult:
    state: SceneState
    trace: list[LossBreakdown]
    aborted: bool = False
    message: str = ""
