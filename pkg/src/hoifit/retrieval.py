"""Retrieval-based action recognition over a labeled pose database.

Actions are transferred from the single nearest database pose under the
Euclidean distance between concatenated axis-angle joint rotations. The
global root orientation (first three coordinates) is excluded by default so
camera-relative heading does not change the recognized action.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from .errors import InvalidInputError, NoCandidateError

POSE_DIM = 72


@dataclass(frozen=True)
class ActionLabel:
    verb: str
    object_category: str
    weight: float = 1.0


@dataclass(frozen=True)
class PoseEntry:
    pose: np.ndarray
    action: str
    category: str
    provenance: int
    weight: float = 1.0

    def label(self) -> ActionLabel:
        return ActionLabel(self.action, self.category, self.weight)


@dataclass
class RetrievalConfig:
    include_root: bool = False
    geodesic: bool = False


@dataclass
class PoseDatabase:
    entries: list[PoseEntry]
    config: RetrievalConfig = field(default_factory=RetrievalConfig)

    def __post_init__(self):
        if not self.entries:
            raise InvalidInputError("pose database needs at least one entry")
        mat = np.stack([e.pose for e in self.entries])
        if mat.shape[1] != POSE_DIM:
            raise InvalidInputError(f"pose vectors must be {POSE_DIM}-dim, got {mat.shape[1]}")
        self._vectors = mat
        self._tree = cKDTree(self._feature(mat))
        self._category_trees: dict[str, tuple[np.ndarray, cKDTree]] = {}

    def _feature(self, vecs: np.ndarray) -> np.ndarray:
        return vecs if self.config.include_root else vecs[:, 3:]

    def _tree_for(self, category: str | None):
        if category is None:
            return np.arange(len(self.entries)), self._tree
        if category not in self._category_trees:
            idx = np.array(
                [i for i, e in enumerate(self.entries) if e.category == category], dtype=np.int64
            )
            if idx.size == 0:
                raise NoCandidateError(f"no database entries for category {category!r}")
            self._category_trees[category] = (idx, cKDTree(self._feature(self._vectors[idx])))
        return self._category_trees[category]

    def _geodesic_distances(self, query_feat: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """Sum over joints of relative rotation angles."""
        n = rows.shape[1] // 3
        q = Rotation.from_rotvec(query_feat.reshape(n, 3))
        out = np.empty(len(rows))
        for i, row in enumerate(rows):
            r = Rotation.from_rotvec(row.reshape(n, 3))
            out[i] = (q * r.inv()).magnitude().sum()
        return out

    def nearest(self, query: np.ndarray, category: str | None = None) -> tuple[PoseEntry, float]:
        query = np.asarray(query, dtype=np.float64).reshape(-1)
        if query.shape != (POSE_DIM,):
            raise InvalidInputError(f"query pose must be {POSE_DIM}-dim, got {query.shape}")
        idx, tree = self._tree_for(category)
        q = self._feature(query[None])[0]

        if self.config.geodesic:
            d = self._geodesic_distances(q, self._feature(self._vectors[idx]))
            best = float(d.min())
            tied = idx[d <= best + 1e-12]
        else:
            best, _ = tree.query(q, k=1)
            best = float(best)
            tied = idx[tree.query_ball_point(q, r=best * (1 + 1e-12) + 1e-15)]
        # Equidistant entries resolve to the lowest provenance id.
        winner = min(tied, key=lambda i: self.entries[i].provenance)
        return self.entries[winner], best


def build_pose_index(entries, config: RetrievalConfig | None = None) -> PoseDatabase:
    """Validate entries and build the nearest-neighbor index."""
    parsed = []
    for e in entries:
        if isinstance(e, PoseEntry):
            pose = np.asarray(e.pose, dtype=np.float64).reshape(-1)
            if pose.shape != (POSE_DIM,):
                raise InvalidInputError(f"pose must be {POSE_DIM}-dim, got {pose.shape}")
            parsed.append(
                PoseEntry(pose, e.action, e.category, int(e.provenance), float(e.weight))
            )
        else:
            pose = np.asarray(e[0], dtype=np.float64).reshape(-1)
            if pose.shape != (POSE_DIM,):
                raise InvalidInputError(f"pose must be {POSE_DIM}-dim, got {pose.shape}")
            parsed.append(PoseEntry(pose, e[1], e[2], int(e[3]), float(e[4]) if len(e) > 4 else 1.0))
    return PoseDatabase(parsed, config or RetrievalConfig())


def retrieve_action(db: PoseDatabase, query, category: str | None = None) -> tuple[ActionLabel, float]:
    """Label of the single nearest database pose, plus its distance."""
    entry, distance = db.nearest(query, category)
    return entry.label(), distance


def load_pose_database(path, config: RetrievalConfig | None = None) -> PoseDatabase:
    """Line-delimited JSON records: pose, action, category, id, [weight]."""
    entries = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        pose = np.asarray(rec["pose"], dtype=np.float64)
        if pose.shape != (POSE_DIM,):
            raise InvalidInputError(f"{path}:{line_no}: pose must be {POSE_DIM}-dim")
        entries.append(
            PoseEntry(pose, rec["action"], rec["category"], int(rec["id"]), float(rec.get("weight", 1.0)))
        )
    return build_pose_index(entries, config)


def save_pose_database(path, entries) -> None:
    lines = []
    for e in entries:
        lines.append(
            json.dumps(
                {
                    "pose": [float(x) for x in e.pose],
                    "action": e.action,
                    "category": e.category,
                    "id": e.provenance,
                    "weight": e.weight,
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class Detection:
    label: str
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def is_person(self) -> bool:
        return self.label == "person"

    def iou(self, other: "Detection") -> float:
        ix0, iy0 = max(self.x0, other.x0), max(self.y0, other.y0)
        ix1, iy1 = min(self.x1, other.x1), min(self.y1, other.y1)
        inter = max(0.0, ix1 - ix0) * max(0.0, iy1 - iy0)
        area = lambda d: (d.x1 - d.x0) * (d.y1 - d.y0)
        union = area(self) + area(other) - inter
        return inter / union if union > 0 else 0.0


@dataclass(frozen=True)
class ImageMeta:
    width: int
    height: int
    detections: tuple[Detection, ...]


@dataclass
class AdmissionConfig:
    min_dimension: int = 300
    iou_band: tuple[float, float] = (0.01, 0.95)


def admit_database_image(meta: ImageMeta, config: AdmissionConfig | None = None) -> tuple[bool, str]:
    """Admission predicate for candidate database images.

    Accepts only images larger than the minimum dimension on both axes that
    contain exactly one person and one object whose boxes overlap within the
    validity band. The reason names the first failed predicate.
    """
    config = config or AdmissionConfig()
    if meta.width <= 0 or meta.height <= 0:
        raise InvalidInputError(f"invalid image size {meta.width}x{meta.height}")
    for d in meta.detections:
        if d.x1 < d.x0 or d.y1 < d.y0:
            raise InvalidInputError(f"malformed box for {d.label!r}")
    if meta.width <= config.min_dimension or meta.height <= config.min_dimension:
        return False, "min-dimension"
    persons = [d for d in meta.detections if d.is_person]
    objects = [d for d in meta.detections if not d.is_person]
    if len(persons) != 1:
        return False, "person-count"
    if len(objects) != 1:
        return False, "object-count"
    iou = persons[0].iou(objects[0])
    lo, hi = config.iou_band
    if not (lo <= iou <= hi):
        return False, "iou-band"
    return True, "ok"
