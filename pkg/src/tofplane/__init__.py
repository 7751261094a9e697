"""Planar rectification toolkit for pulse-based ToF depth images.

Depth maps from pulse ToF cameras bend planar surfaces (multipath
reflections curl floors up near range limits and corners). This package
extracts the floor with axis-constrained two-stage RANSAC, flattens it
onto its best tight-fit plane to synthesize ground-truth depth, and
scores clouds with a per-axis + log-depth loss family and a curvature
gradient metric. A synthetic scene generator provides analytic oracles.
"""

from .geometry import (
    CameraIntrinsics,
    DepthImage,
    PlaneModel,
    PointCloud,
    align_plane_to_xy,
    rotation_aligning_to_z,
    depth_to_pointcloud,
    pointcloud_to_depth,
    project_points_to_plane,
)
from .imgio import (
    read_depth_png,
    read_intrinsics_json,
    read_manifest,
    write_depth_png,
    write_intrinsics_json,
    write_manifest,
)
from .metrics import (
    CurvatureReport,
    LossBreakdown,
    curvature_gradient,
    evaluate_plane_set,
    gradient_histogram,
    loss_components,
)
from .pipeline import DatasetManifest, build_dataset, rectify_frame
from .ransac import (
    RansacConfig,
    default_loose_config,
    default_tight_config,
    derive_tight_config,
    fit_plane_ransac,
    stable_seed,
    two_stage_ground_extraction,
)
from .synth import CameraPose, ClutterBox, SceneSpec, render_scene

__version__ = "0.1.0"

__all__ = [
    "CameraIntrinsics",
    "CameraPose",
    "ClutterBox",
    "CurvatureReport",
    "DatasetManifest",
    "DepthImage",
    "LossBreakdown",
    "PlaneModel",
    "PointCloud",
    "RansacConfig",
    "SceneSpec",
    "align_plane_to_xy",
    "rotation_aligning_to_z",
    "build_dataset",
    "curvature_gradient",
    "default_loose_config",
    "default_tight_config",
    "depth_to_pointcloud",
    "derive_tight_config",
    "evaluate_plane_set",
    "fit_plane_ransac",
    "gradient_histogram",
    "loss_components",
    "pointcloud_to_depth",
    "project_points_to_plane",
    "read_depth_png",
    "read_intrinsics_json",
    "read_manifest",
    "rectify_frame",
    "render_scene",
    "stable_seed",
    "two_stage_ground_extraction",
    "write_depth_png",
    "write_intrinsics_json",
    "write_manifest",
]
