"""Axis-constrained RANSAC plane fitting and two-stage floor extraction.

A candidate plane is kept only if its normal lies within a configurable
angle of a reference axis (sign-insensitive), so segmentation locks onto
the ground floor rather than walls or furniture. Extraction runs twice —
a permissive pass that captures every floor-belonging point including
curled edges, then a strict pass whose plane approximates the true floor.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .geometry import PlaneModel, PointCloud

# Default loose/tight parameter pairs for the two extraction stages.
LOOSE_THRESHOLD = 1.7
LOOSE_MAX_ANGLE = 20.0
TIGHT_THRESHOLD = 1.3
TIGHT_MAX_ANGLE = 15.0

_DEGENERATE_NORM = 1e-12  # cross products below this are collinear samples
_COUNT_CHUNK = 128  # candidate planes scored per matrix block


@dataclass(frozen=True)
class RansacConfig:
    """Parameters for one constrained plane-fitting pass.

    ``distance_threshold`` is in the point cloud's native linear unit;
    ``max_axis_angle`` is in degrees; ``axis`` is the direction the plane
    normal must be near (either sign).
    """

    distance_threshold: float
    max_axis_angle: float
    axis: tuple[float, float, float] = (0.0, 1.0, 0.0)
    iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.distance_threshold <= 0:
            raise ValueError("distance_threshold must be positive")
        if not (0 < self.max_axis_angle <= 90):
            raise ValueError("max_axis_angle must be in (0, 90] degrees")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        ax = np.asarray(self.axis, dtype=np.float64)
        norm = np.linalg.norm(ax)
        if norm < _DEGENERATE_NORM:
            raise ValueError("axis must be a nonzero vector")
        object.__setattr__(self, "axis", tuple(ax / norm))

    def axis_vector(self) -> np.ndarray:
        return np.asarray(self.axis, dtype=np.float64)

    def to_dict(self) -> dict:
        return {
            "distance_threshold": self.distance_threshold,
            "max_axis_angle": self.max_axis_angle,
            "axis": list(self.axis),
            "iterations": self.iterations,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RansacConfig":
        return cls(
            distance_threshold=float(d["distance_threshold"]),
            max_axis_angle=float(d["max_axis_angle"]),
            axis=tuple(d.get("axis", (0.0, 1.0, 0.0))),
            iterations=int(d.get("iterations", 1000)),
            seed=int(d.get("seed", 0)),
        )


def stable_seed(global_seed: int, label: str) -> int:
    """Deterministic per-item seed independent of processing order."""
    digest = hashlib.sha256(f"{global_seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1  # keep it non-negative


def _sample_triples(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Draw ``count`` index triples with 3 distinct members each."""
    idx = rng.integers(0, n, size=(count, 3))
    while True:
        dup = (
            (idx[:, 0] == idx[:, 1])
            | (idx[:, 1] == idx[:, 2])
            | (idx[:, 0] == idx[:, 2])
        )
        if not dup.any():
            return idx
        idx[dup] = rng.integers(0, n, size=(int(dup.sum()), 3))


def _candidate_planes(pts: np.ndarray, idx: np.ndarray,
                      axis: np.ndarray, max_angle_deg: float):
    """Planes through sampled triples that satisfy the axis constraint.

    Returns (normals, offsets) with normals unit-length and sign-flipped
    toward ``axis``; collinear triples and over-tilted normals are dropped.
    """
    p0 = pts[idx[:, 0]]
    normals = np.cross(pts[idx[:, 1]] - p0, pts[idx[:, 2]] - p0)
    norms = np.linalg.norm(normals, axis=1)
    ok = norms > _DEGENERATE_NORM
    normals = normals[ok] / norms[ok, None]
    p0 = p0[ok]

    dots = normals @ axis
    flip = dots < 0
    normals[flip] = -normals[flip]
    angles = np.degrees(np.arccos(np.clip(np.abs(dots), 0.0, 1.0)))
    ok = angles <= max_angle_deg
    normals = normals[ok]
    offsets = -np.einsum("ij,ij->i", normals, p0[ok])
    return normals, offsets


def _best_candidate(pts: np.ndarray, normals: np.ndarray, offsets: np.ndarray,
                    threshold: float) -> tuple[int, int]:
    """Index and inlier count of the winning candidate, first-found ties."""
    best_i, best_count = -1, -1
    for start in range(0, len(normals), _COUNT_CHUNK):
        block = slice(start, start + _COUNT_CHUNK)
        dist = np.abs(pts @ normals[block].T + offsets[block])
        counts = (dist <= threshold).sum(axis=0)
        i = int(np.argmax(counts))  # first max within the block
        if counts[i] > best_count:
            best_i, best_count = start + i, int(counts[i])
    return best_i, best_count


def _least_squares_plane(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Total-least-squares plane: smallest eigenvector of the covariance."""
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    cov = centered.T @ centered
    _, vecs = np.linalg.eigh(cov)
    normal = vecs[:, 0]
    return normal, float(-normal @ centroid)


def fit_plane_ransac(pcd: PointCloud, cfg: RansacConfig, *,
                     refit: bool = True) -> PlaneModel:
    """Fit the largest plane whose normal is near cfg.axis.

    Samples ``cfg.iterations`` point triples, keeps candidates satisfying
    the angle constraint, and returns the one with the most inliers
    (|n.p + d| <= distance_threshold). With ``refit`` the winner's
    coefficients are re-estimated by least squares over its inliers and
    the inlier set recomputed once; if the refit normal drifts past the
    angle constraint the consensus candidate is kept instead. Deterministic
    for a given seed.

    Raises ValueError("degenerate input") for clouds of < 3 points and
    ValueError("no constrained plane found") when every sampled candidate
    violates the axis constraint.
    """
    pts = pcd.points
    if len(pts) < 3:
        raise ValueError("degenerate input")

    axis = cfg.axis_vector()
    rng = np.random.default_rng(cfg.seed)
    idx = _sample_triples(rng, len(pts), cfg.iterations)
    normals, offsets = _candidate_planes(pts, idx, axis, cfg.max_axis_angle)
    if len(normals) == 0:
        raise ValueError("no constrained plane found")

    best_i, _ = _best_candidate(pts, normals, offsets, cfg.distance_threshold)
    normal, d = normals[best_i], float(offsets[best_i])
    inliers = np.flatnonzero(np.abs(pts @ normal + d) <= cfg.distance_threshold)

    if refit:
        refit_normal, refit_d = _least_squares_plane(pts[inliers])
        if refit_normal @ axis < 0:
            refit_normal, refit_d = -refit_normal, -refit_d
        angle = np.degrees(np.arccos(np.clip(refit_normal @ axis, -1.0, 1.0)))
        if angle <= cfg.max_axis_angle:
            normal, d = refit_normal, refit_d
            inliers = np.flatnonzero(
                np.abs(pts @ normal + d) <= cfg.distance_threshold)

    return PlaneModel(float(normal[0]), float(normal[1]), float(normal[2]),
                      float(d), inliers)


def default_loose_config(**overrides) -> RansacConfig:
    return replace(RansacConfig(LOOSE_THRESHOLD, LOOSE_MAX_ANGLE), **overrides)


def default_tight_config(**overrides) -> RansacConfig:
    return replace(RansacConfig(TIGHT_THRESHOLD, TIGHT_MAX_ANGLE), **overrides)


def derive_tight_config(loose: RansacConfig) -> RansacConfig:
    """Strict-stage config scaled from a loose one by the default ratios."""
    return replace(
        loose,
        distance_threshold=loose.distance_threshold * (TIGHT_THRESHOLD / LOOSE_THRESHOLD),
        max_axis_angle=loose.max_axis_angle * (TIGHT_MAX_ANGLE / LOOSE_MAX_ANGLE),
        seed=loose.seed + 1,
    )


def two_stage_ground_extraction(
    pcd: PointCloud,
    loose: RansacConfig | None = None,
    tight: RansacConfig | None = None,
) -> tuple[np.ndarray, PlaneModel]:
    """Loose pass captures all floor points, strict pass estimates the plane.

    Both passes run on the full cloud. Returns (loose inlier indices,
    tight-pass plane). Loose points that curl away from the true floor are
    expected to sit outside the tight plane's threshold — that asymmetry is
    what rectification later removes.
    """
    if loose is None:
        loose = default_loose_config()
    if tight is None:
        tight = default_tight_config(axis=loose.axis, iterations=loose.iterations,
                                     seed=loose.seed + 1)
    if (tight.distance_threshold > loose.distance_threshold
            or tight.max_axis_angle > loose.max_axis_angle):
        warnings.warn("tight stage is more permissive than loose stage",
                      stacklevel=2)

    loose_plane = fit_plane_ransac(pcd, loose)
    tight_plane = fit_plane_ransac(pcd, tight)
    return loose_plane.inliers, tight_plane
