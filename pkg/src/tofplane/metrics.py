"""Point-cloud comparison losses and the curvature-gradient plane metric.

The loss family scores a predicted cloud against ground truth with
per-axis mean squared differences plus a scale-invariant log-depth RMSE,
combined into a single scalar:

    total = s * rmse * |3 - e^loss_x - e^loss_y - e^loss_z|

The curvature gradient scores how a plane's points distribute around it:
after rigidly aligning the plane to z = 0, it is the fraction of absolute
point mass below the plane, sum|z<0| / (sum|z<0| + sum|z>=0|). A perfectly
planar set scores 0; symmetric distortion scores 0.5; one-sided curl
pushes toward 0 or 1 depending on side.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import DepthImage, PlaneModel, PointCloud, depth_to_pointcloud
from .ransac import RansacConfig, derive_tight_config, stable_seed, two_stage_ground_extraction

DEFAULT_SCALE_S = 100000.0
HISTOGRAM_BINS = 10
_FLAT_EPS = 1e-12  # both-side mass below this counts as a perfect plane


@dataclass(frozen=True)
class LossBreakdown:
    """Per-axis squared means, log-depth RMSE, and the combined total."""

    loss_x: float
    loss_y: float
    loss_z: float
    loss_rmse: float
    total: float
    s: float

    def to_dict(self) -> dict:
        return {
            "loss_x": self.loss_x,
            "loss_y": self.loss_y,
            "loss_z": self.loss_z,
            "loss_rmse": self.loss_rmse,
            "total": self.total,
            "s": self.s,
        }


@dataclass
class CurvatureReport:
    """Per-plane curvature gradients with histogram and spread summary."""

    per_plane: list[dict] = field(default_factory=list)
    histogram: np.ndarray = field(
        default_factory=lambda: np.zeros(HISTOGRAM_BINS, dtype=np.int64))
    std_dev: float = 0.0
    skipped: list[dict] = field(default_factory=list)

    @property
    def gradients(self) -> np.ndarray:
        return np.array([p["curv_grad"] for p in self.per_plane])

    @property
    def mean(self) -> float:
        g = self.gradients
        return float(g.mean()) if len(g) else 0.0

    def to_dict(self) -> dict:
        return {
            "per_plane": self.per_plane,
            "histogram": self.histogram.tolist(),
            "std_dev": self.std_dev,
            "mean": self.mean,
            "skipped": self.skipped,
        }


def loss_components(gt: PointCloud, pred: PointCloud,
                    s: float = DEFAULT_SCALE_S) -> LossBreakdown:
    """Evaluate the loss family on positionally corresponding clouds.

    Points where either cloud has z = 0 (invalid depth) are excluded.
    Raises ValueError on length mismatch and
    ValueError("no comparable points") when nothing survives exclusion.
    """
    if len(gt) != len(pred):
        raise ValueError("point clouds must have equal length")
    g, p = gt.points, pred.points
    keep = (g[:, 2] != 0.0) & (p[:, 2] != 0.0)
    if not keep.any():
        raise ValueError("no comparable points")
    g, p = g[keep], p[keep]

    diff2 = (p - g) ** 2
    loss_x, loss_y, loss_z = diff2.mean(axis=0)
    log_diff = np.log(np.abs(p[:, 2])) - np.log(np.abs(g[:, 2]))
    loss_rmse = float(np.sqrt(np.mean(log_diff**2)))
    total = s * loss_rmse * abs(3.0 - np.exp(loss_x) - np.exp(loss_y) - np.exp(loss_z))
    return LossBreakdown(float(loss_x), float(loss_y), float(loss_z),
                         loss_rmse, float(total), s)


def curvature_gradient(plane_points: PointCloud, plane: PlaneModel) -> float:
    """Fraction of absolute point mass below the plane, in [0, 1].

    Conceptually aligns the points so the plane is z = 0 and splits them
    into z < 0 and z >= 0; the aligned z of a point equals its signed
    distance n.p + d, which is what gets computed (same value, no rotation
    round-off). Per-point |z| below 1e-12 is snapped to zero so exactly
    projected clouds of any size register as planar; returns 0 when both
    side masses vanish. Raises ValueError on empty input.
    """
    if len(plane_points) == 0:
        raise ValueError("empty point cloud")
    z = plane.signed_distance(plane_points.points)
    z = np.where(np.abs(z) < _FLAT_EPS, 0.0, z)
    below = float(-z[z < 0].sum())
    above = float(z[z >= 0].sum())
    if below < _FLAT_EPS and above < _FLAT_EPS:
        return 0.0
    return below / (below + above)


def gradient_histogram(gradients: np.ndarray) -> np.ndarray:
    """10-bin counts over [0, 1] with 1.0 falling in the last bin."""
    g = np.asarray(gradients, dtype=np.float64)
    bins = np.clip(np.floor(g * HISTOGRAM_BINS).astype(np.int64),
                   0, HISTOGRAM_BINS - 1)
    return np.bincount(bins, minlength=HISTOGRAM_BINS)


def _frame_gradient(frame: DepthImage, fid: str, loose: RansacConfig,
                    tight: RansacConfig) -> dict:
    seed = stable_seed(loose.seed, fid)
    cloud = depth_to_pointcloud(frame)
    try:
        loose_idx, tight_plane = two_stage_ground_extraction(
            cloud, replace(loose, seed=seed), replace(tight, seed=seed + 1))
        grad = curvature_gradient(cloud.take(loose_idx), tight_plane)
    except ValueError as exc:
        return {"frame_id": fid, "skipped": str(exc)}
    return {"frame_id": fid, "curv_grad": grad, "point_count": int(len(loose_idx))}


def evaluate_plane_set(
    frames: list[DepthImage],
    ransac: RansacConfig,
    tight: RansacConfig | None = None,
    frame_ids: list[str] | None = None,
    jobs: int | None = None,
) -> CurvatureReport:
    """Extract each frame's floor plane and report its curvature gradient.

    ``ransac`` drives the permissive extraction that gathers all
    floor-belonging points; ``tight`` (derived from ``ransac`` by the
    default stage ratios when omitted) estimates the reference plane the
    gradient is measured against. Scoring a permissive inlier set against
    its own least-squares plane would split the mass evenly by
    construction, so the strict-stage plane is the anchor that makes the
    metric sensitive to one-sided curl.

    Per-frame RANSAC seeds derive from (ransac.seed, frame id), so results
    are independent of frame order and of ``jobs``. Frames without a
    constrained plane are recorded in ``skipped`` and excluded from the
    histogram. ``std_dev`` is the population standard deviation.
    """
    if not frames:
        raise ValueError("empty frame list")
    if tight is None:
        tight = derive_tight_config(ransac)
    ids = frame_ids if frame_ids is not None else [str(i) for i in range(len(frames))]
    if len(ids) != len(frames):
        raise ValueError("frame_ids length must match frames")

    if jobs is not None and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_frame_gradient, frame, fid, ransac, tight)
                       for fid, frame in zip(ids, frames)]
            results = [f.result() for f in futures]  # keeps input order
    else:
        results = [_frame_gradient(frame, fid, ransac, tight)
                   for fid, frame in zip(ids, frames)]

    report = CurvatureReport()
    for rec in results:
        if "skipped" in rec:
            report.skipped.append({"frame_id": rec["frame_id"],
                                   "reason": rec["skipped"]})
        else:
            report.per_plane.append(rec)

    grads = report.gradients
    if len(grads):
        report.histogram = gradient_histogram(grads)
        report.std_dev = float(grads.std())  # population std
    return report
