from .canonical import canonicalize_mesh, fits_unit_box
from .chamfer import one_way_chamfer, symmetric_chamfer
from .decimate import decimate_quadric
from .mesh import (
    PartLabeledMesh,
    TriangleMesh,
    part_mean_normal,
    part_normal_stats,
    single_part_mesh,
)
from .sdf import SdfGrid, compute_sdf_grid, point_in_mesh, sample_sdf, unsigned_distance, winding_number
from .transforms import (
    RigidSimTransform,
    axis_angle_to_matrix,
    matrix_to_axis_angle,
    procrustes_align,
)

__all__ = [
    "PartLabeledMesh",
    "RigidSimTransform",
    "SdfGrid",
    "TriangleMesh",
    "axis_angle_to_matrix",
    "canonicalize_mesh",
    "compute_sdf_grid",
    "decimate_quadric",
    "fits_unit_box",
    "matrix_to_axis_angle",
    "one_way_chamfer",
    "part_mean_normal",
    "part_normal_stats",
    "point_in_mesh",
    "procrustes_align",
    "sample_sdf",
    "single_part_mesh",
    "symmetric_chamfer",
    "unsigned_distance",
    "winding_number",
]
