"""Pinhole projection math between depth images, point clouds, and planes.

Coordinate conventions used throughout the package:

Camera frame (right-handed, image-style):
  - Origin: camera optical center
  - +X: right in the image
  - +Y: down in the image
  - +Z: forward along the optical axis, into the scene

Image frame:
  - u: column index, increases to the right
  - v: row index, increases downward
  - (cx, cy): principal point, where the optical axis meets the image

Depth convention: a stored depth value is the perpendicular (optical-axis)
z-depth in integer units, not the ray length. Metric depth is
``value * depth_scale``. Value 0 marks an invalid pixel (no return).

With +Y pointing down, a ground floor below the camera has a plane normal
near the Y axis.

Pinhole equations for pixel (u, v) at metric depth z:
    x = (u - cx) * z / fx
    y = (v - cy) * z / fy
Back-projection:
    u = round(fx * x / z + cx)
    v = round(fy * y / z + cy)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEPTH_MAX_UNITS = 65535  # storage range of 16-bit depth images


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole parameters mapping pixels to 3D rays and back."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    depth_scale: float  # meters per stored depth unit

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if self.depth_scale <= 0:
            raise ValueError("depth_scale must be positive")
        if not (0 <= self.cx < self.width) or not (0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")

    def to_dict(self) -> dict:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
            "depth_scale": self.depth_scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraIntrinsics":
        return cls(
            fx=float(d["fx"]),
            fy=float(d["fy"]),
            cx=float(d["cx"]),
            cy=float(d["cy"]),
            width=int(d["width"]),
            height=int(d["height"]),
            depth_scale=float(d["depth_scale"]),
        )


@dataclass
class DepthImage:
    """Row-major grid of non-negative integer depth units with intrinsics.

    Value 0 means invalid / no return; all valid values are > 0.
    """

    data: np.ndarray  # (height, width) uint16
    intrinsics: CameraIntrinsics

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 2:
            raise ValueError("depth data must be a 2D grid")
        if self.data.shape != (self.intrinsics.height, self.intrinsics.width):
            raise ValueError("depth dimensions do not match intrinsics")
        if self.data.dtype != np.uint16:
            if np.any(self.data < 0) or np.any(self.data > DEPTH_MAX_UNITS):
                raise ValueError("depth values out of storage range")
            self.data = self.data.astype(np.uint16)

    @property
    def valid_mask(self) -> np.ndarray:
        return self.data > 0

    def valid_count(self) -> int:
        return int(np.count_nonzero(self.data))


@dataclass
class PointCloud:
    """Ordered set of 3D points in meters, optionally with pixel provenance.

    ``pixel_index`` holds one (u, v) source pixel per point when the cloud
    came from a depth image; operations that reorder or subset points carry
    it along.
    """

    points: np.ndarray  # (n, 3) float64
    pixel_index: np.ndarray | None = None  # (n, 2) int, columns (u, v)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if self.points.size == 0:
            self.points = self.points.reshape(0, 3)
        if self.points.shape[1] != 3:
            raise ValueError("points must be (n, 3)")
        if self.pixel_index is not None:
            self.pixel_index = np.asarray(self.pixel_index, dtype=np.int64)
            if self.pixel_index.size == 0:
                self.pixel_index = self.pixel_index.reshape(0, 2)
            if self.pixel_index.shape != (len(self.points), 2):
                raise ValueError("pixel_index length must match points")

    def __len__(self) -> int:
        return len(self.points)

    def take(self, indices: np.ndarray) -> "PointCloud":
        """Subset by point indices, preserving order and provenance."""
        idx = np.asarray(indices, dtype=np.int64)
        px = self.pixel_index[idx] if self.pixel_index is not None else None
        return PointCloud(self.points[idx], px)

    def with_points_replaced(self, indices: np.ndarray, new_points: np.ndarray) -> "PointCloud":
        """Copy of the cloud with coordinates at ``indices`` swapped out."""
        pts = self.points.copy()
        pts[np.asarray(indices, dtype=np.int64)] = new_points
        px = self.pixel_index.copy() if self.pixel_index is not None else None
        return PointCloud(pts, px)


@dataclass
class PlaneModel:
    """Plane ax + by + cz + d = 0 with (a, b, c) a unit normal.

    ``inliers`` indexes into the point cloud the plane was fitted to.
    """

    a: float
    b: float
    c: float
    d: float
    inliers: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    def __post_init__(self):
        n2 = self.a * self.a + self.b * self.b + self.c * self.c
        if abs(n2 - 1.0) > 1e-9:
            raise ValueError("plane normal must be unit length")
        self.inliers = np.asarray(self.inliers, dtype=np.int64)

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        return pts @ self.normal + self.d

    @classmethod
    def from_normal_d(cls, normal: np.ndarray, d: float,
                      inliers: np.ndarray | None = None) -> "PlaneModel":
        n = np.asarray(normal, dtype=np.float64)
        norm = np.linalg.norm(n)
        if norm < 1e-12:
            raise ValueError("invalid plane")
        n = n / norm
        inl = inliers if inliers is not None else np.empty(0, dtype=np.int64)
        return cls(float(n[0]), float(n[1]), float(n[2]), float(d / norm), inl)


def _round_half_up(x: np.ndarray) -> np.ndarray:
    # np.round ties to even; pixel and depth quantization use half-up for a
    # stable, direction-independent rule.
    return np.floor(x + 0.5)


def depth_to_pointcloud(img: DepthImage) -> PointCloud:
    """Unproject every valid pixel to a 3D point, row-major order.

    One point per nonzero pixel: (x, y, z) with z = value * depth_scale and
    x, y from the pinhole equations. ``pixel_index`` records (u, v).
    """
    intr = img.intrinsics
    v, u = np.nonzero(img.data)  # row-major scan order
    z = img.data[v, u].astype(np.float64) * intr.depth_scale
    x = (u - intr.cx) * z / intr.fx
    y = (v - intr.cy) * z / intr.fy
    points = np.column_stack([x, y, z])
    pixel_index = np.column_stack([u, v])
    return PointCloud(points, pixel_index)


def pointcloud_to_depth(pcd: PointCloud, intr: CameraIntrinsics) -> DepthImage:
    """Project points to a depth image; nearest point wins each pixel.

    Points with z <= 0 or projecting outside the image are dropped. Stored
    value is round(z / depth_scale) clamped to the 16-bit range; untouched
    pixels stay 0.
    """
    data = np.zeros((intr.height, intr.width), dtype=np.uint16)
    if len(pcd) == 0:
        return DepthImage(data, intr)

    pts = pcd.points
    front = pts[:, 2] > 0
    pts = pts[front]
    if len(pts) == 0:
        return DepthImage(data, intr)

    z = pts[:, 2]
    u = _round_half_up(intr.fx * pts[:, 0] / z + intr.cx)
    v = _round_half_up(intr.fy * pts[:, 1] / z + intr.cy)
    in_bounds = (u >= 0) & (u < intr.width) & (v >= 0) & (v < intr.height)
    u = u[in_bounds].astype(np.int64)
    v = v[in_bounds].astype(np.int64)
    z = z[in_bounds]

    # z-buffer: write far-to-near so the smallest z lands last
    order = np.argsort(-z, kind="stable")
    units = np.clip(_round_half_up(z / intr.depth_scale), 0, DEPTH_MAX_UNITS)
    data[v[order], u[order]] = units[order].astype(np.uint16)
    return DepthImage(data, intr)


def project_points_to_plane(pcd: PointCloud, plane: PlaneModel) -> PointCloud:
    """Orthogonally project every point onto the plane.

    p -> p - (n.p + d) n. Order and pixel provenance are preserved.
    """
    n = plane.normal
    dist = pcd.points @ n + plane.d
    projected = pcd.points - np.outer(dist, n)
    px = pcd.pixel_index.copy() if pcd.pixel_index is not None else None
    return PointCloud(projected, px)


def rotation_aligning_to_z(normal: np.ndarray) -> np.ndarray:
    """Minimal-angle rotation matrix taking ``normal`` to (0, 0, 1).

    Identity when already aligned; a 180-degree rotation about the X axis
    when anti-parallel.
    """
    n = np.asarray(normal, dtype=np.float64)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise ValueError("invalid plane")
    n = n / norm
    c = n[2]  # cos(angle to +Z)
    if c < -1.0 + 1e-12:
        return np.diag([1.0, -1.0, -1.0])  # 180 degrees about X
    v = np.cross(n, [0.0, 0.0, 1.0])
    vx = np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])
    return np.eye(3) + vx + vx @ vx / (1.0 + c)


def align_plane_to_xy(pcd: PointCloud, plane: PlaneModel) -> PointCloud:
    """Rigidly move the cloud so the plane becomes z = 0.

    Rotates the plane normal onto +Z, then translates the plane onto the XY
    coordinate plane. A point's resulting z equals its signed distance
    n.p + d to the original plane.
    """
    rot = rotation_aligning_to_z(plane.normal)
    moved = pcd.points @ rot.T
    moved[:, 2] += plane.d
    px = pcd.pixel_index.copy() if pcd.pixel_index is not None else None
    return PointCloud(moved, px)
