"""Synthetic depth-camera scenes with a radially bowed floor and clutter.

World frame: right-handed, +Z up. The floor is nominally the plane
z = floor_height and stays truly planar out to half the extent; beyond
that the surface curls upward toward the floor's edge, peaking at
bow_amplitude where the floor ends:

    z_surface(r) = floor_height + bow_amplitude * q(r)^p + roughness
    q(r) = max(0, r - extent/2) / (extent/2)

with r the horizontal distance from the camera's ground footprint and
p = 2 (quadratic) or 4 (quartic). The flat-center/curled-edge shape
mimics how multipath reflections bend floor regions near range limits
toward the sensor while the analytic plane stays flat — so every
rendered frame comes with exact ground truth: the un-bowed plane (in
camera coordinates) and the floor pixel mask.

The floor exists for r <= extent; rays that miss it and every clutter box
read 0 (no return). Roughness is per-pixel truncated Gaussian noise
(clipped at 4 sigma), drawn from the scene seed before any geometry so
clutter pixels are byte-identical across bow settings. Floor deviation
from the analytic plane is therefore bounded by bow_amplitude + 4 * sigma.

The camera pose is position + pitch/yaw. Pitch is degrees below the
horizon (90 = straight down); yaw rotates the view about world +Z. The
returned plane normal points into the floor (world down expressed in
camera coordinates), the orientation axis-constrained extraction settles
on for a downward reference axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import CameraIntrinsics, DepthImage, PlaneModel

BOW_PROFILES = {"quadratic": 2, "quartic": 4}
_NOISE_CLIP_SIGMAS = 4.0
_SURFACE_ITERATIONS = 40


@dataclass(frozen=True)
class ClutterBox:
    """Axis-aligned box in world coordinates."""

    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]

    def __post_init__(self):
        lo = np.asarray(self.min_corner, dtype=np.float64)
        hi = np.asarray(self.max_corner, dtype=np.float64)
        if lo.shape != (3,) or hi.shape != (3,):
            raise ValueError("box corners must be 3-vectors")
        if np.any(hi <= lo):
            raise ValueError("box max_corner must exceed min_corner")
        object.__setattr__(self, "min_corner", tuple(lo))
        object.__setattr__(self, "max_corner", tuple(hi))

    def to_dict(self) -> dict:
        return {"min_corner": list(self.min_corner), "max_corner": list(self.max_corner)}

    @classmethod
    def from_dict(cls, d: dict) -> "ClutterBox":
        return cls(tuple(d["min_corner"]), tuple(d["max_corner"]))


@dataclass(frozen=True)
class CameraPose:
    """Camera position with pitch below the horizon and yaw about world +Z."""

    position: tuple[float, float, float]
    pitch_deg: float
    yaw_deg: float = 0.0

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=np.float64)
        if pos.shape != (3,):
            raise ValueError("position must be a 3-vector")
        object.__setattr__(self, "position", tuple(pos))

    def rotation_c2w(self) -> np.ndarray:
        """Columns are the camera basis vectors in world coordinates.

        At yaw 0 the camera looks along +world-Y, tilted down by pitch;
        camera +X stays horizontal, camera +Y (image down) tilts toward
        world-down.
        """
        phi = np.radians(self.pitch_deg)
        psi = np.radians(self.yaw_deg)
        base = np.array([
            [1.0, 0.0, 0.0],
            [0.0, -np.sin(phi), np.cos(phi)],
            [0.0, -np.cos(phi), -np.sin(phi)],
        ])
        yaw = np.array([
            [np.cos(psi), -np.sin(psi), 0.0],
            [np.sin(psi), np.cos(psi), 0.0],
            [0.0, 0.0, 1.0],
        ])
        return yaw @ base

    def to_dict(self) -> dict:
        return {"position": list(self.position), "pitch_deg": self.pitch_deg,
                "yaw_deg": self.yaw_deg}

    @classmethod
    def from_dict(cls, d: dict) -> "CameraPose":
        return cls(tuple(d["position"]), float(d["pitch_deg"]),
                   float(d.get("yaw_deg", 0.0)))


@dataclass(frozen=True)
class SceneSpec:
    """Floor geometry, curl strength, noise, and clutter for one frame."""

    floor_height: float = 0.0
    bow_amplitude: float = 0.0
    bow_profile: str = "quadratic"
    noise_sigma: float = 0.0
    extent: float = 4.0
    clutter: tuple[ClutterBox, ...] = field(default_factory=tuple)
    seed: int = 0

    def __post_init__(self):
        if self.bow_amplitude < 0:
            raise ValueError("bow_amplitude must be >= 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.extent <= 0:
            raise ValueError("extent must be positive")
        if self.bow_profile not in BOW_PROFILES:
            raise ValueError(f"unknown bow profile {self.bow_profile!r}")
        object.__setattr__(self, "clutter", tuple(self.clutter))

    def to_dict(self) -> dict:
        return {
            "floor_height": self.floor_height,
            "bow_amplitude": self.bow_amplitude,
            "bow_profile": self.bow_profile,
            "noise_sigma": self.noise_sigma,
            "extent": self.extent,
            "clutter": [b.to_dict() for b in self.clutter],
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SceneSpec":
        return cls(
            floor_height=float(d.get("floor_height", 0.0)),
            bow_amplitude=float(d.get("bow_amplitude", 0.0)),
            bow_profile=str(d.get("bow_profile", "quadratic")),
            noise_sigma=float(d.get("noise_sigma", 0.0)),
            extent=float(d.get("extent", 4.0)),
            clutter=tuple(ClutterBox.from_dict(b) for b in d.get("clutter", [])),
            seed=int(d.get("seed", 0)),
        )


def _ray_directions_world(intr: CameraIntrinsics, rot_c2w: np.ndarray) -> np.ndarray:
    """(H, W, 3) unnormalized world ray directions with camera-z component 1.

    The ray parameter t then equals the hit point's camera z-depth directly.
    """
    u = np.arange(intr.width, dtype=np.float64)
    v = np.arange(intr.height, dtype=np.float64)
    uu, vv = np.meshgrid(u, v)
    d_cam = np.stack([(uu - intr.cx) / intr.fx, (vv - intr.cy) / intr.fy,
                      np.ones_like(uu)], axis=-1)
    return d_cam @ rot_c2w.T


def _bow(r: np.ndarray, spec: SceneSpec) -> np.ndarray:
    p = BOW_PROFILES[spec.bow_profile]
    onset = spec.extent / 2.0  # inner half of the floor stays planar
    ramp = np.clip(r - onset, 0.0, onset) / onset
    return spec.bow_amplitude * ramp**p


def _cast_floor(spec: SceneSpec, pose: CameraPose, dirs: np.ndarray,
                roughness: np.ndarray) -> np.ndarray:
    """Per-pixel ray parameter of the floor hit; +inf where the ray misses.

    The surface height depends on the hit's horizontal radius, so the hit
    is found by fixed-point iteration from the flat-floor solution; the
    bow slope is well below the ray descent rate for any visible floor
    pixel, which makes the iteration a contraction.
    """
    cam = np.asarray(pose.position)
    dz = dirs[..., 2]
    descending = dz < -1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(descending, (spec.floor_height - cam[2]) / dz, np.inf)

        target_height = spec.floor_height + roughness
        for _ in range(_SURFACE_ITERATIONS):
            r = np.hypot(t * dirs[..., 0], t * dirs[..., 1])
            t_new = (target_height + _bow(r, spec) - cam[2]) / dz
            t = np.where(descending, t_new, np.inf)

        r = np.hypot(t * dirs[..., 0], t * dirs[..., 1])
    hit = descending & (t > 0) & (r <= spec.extent + 1e-9)
    return np.where(hit, t, np.inf)


def _cast_box(box: ClutterBox, cam: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Slab-test ray parameter of the box entry; +inf where the ray misses."""
    lo = np.asarray(box.min_corner)
    hi = np.asarray(box.max_corner)
    t_enter = np.full(dirs.shape[:2], -np.inf)
    t_exit = np.full(dirs.shape[:2], np.inf)
    for k in range(3):
        d = dirs[..., k]
        safe = np.abs(d) > 1e-15
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = np.where(safe, (lo[k] - cam[k]) / d, -np.inf)
            tb = np.where(safe, (hi[k] - cam[k]) / d, np.inf)
        inside = (cam[k] >= lo[k]) & (cam[k] <= hi[k])
        near = np.where(safe, np.minimum(ta, tb), -np.inf if inside else np.inf)
        far = np.where(safe, np.maximum(ta, tb), np.inf if inside else -np.inf)
        t_enter = np.maximum(t_enter, near)
        t_exit = np.minimum(t_exit, far)
    hit = (t_enter <= t_exit) & (t_enter > 0)
    return np.where(hit, t_enter, np.inf)


def render_scene(
    spec: SceneSpec, intr: CameraIntrinsics, pose: CameraPose,
) -> tuple[DepthImage, PlaneModel, np.ndarray]:
    """Ray-cast the scene into a depth image with exact ground truth.

    Returns (depth image, analytic floor plane in camera coordinates with
    the normal pointing into the floor, boolean floor-pixel mask). Raises
    ValueError("camera below floor") when the camera is not above the
    nominal floor plane.
    """
    cam = np.asarray(pose.position)
    if cam[2] <= spec.floor_height:
        raise ValueError("camera below floor")

    rng = np.random.default_rng(spec.seed)
    sigma = spec.noise_sigma
    noise = rng.normal(0.0, sigma, size=(intr.height, intr.width)) if sigma > 0 \
        else np.zeros((intr.height, intr.width))
    clip = _NOISE_CLIP_SIGMAS * sigma
    noise = np.clip(noise, -clip, clip)

    rot = pose.rotation_c2w()
    dirs = _ray_directions_world(intr, rot)

    t_floor = _cast_floor(spec, pose, dirs, noise)
    t_clutter = np.full_like(t_floor, np.inf)
    for box in spec.clutter:
        t_clutter = np.minimum(t_clutter, _cast_box(box, cam, dirs))

    floor_wins = t_floor <= t_clutter
    # floor roughness rides the surface itself; clutter gets range jitter
    t_scene = np.where(floor_wins, t_floor, t_clutter + noise)
    valid = np.isfinite(t_scene) & (t_scene > 0)

    units = np.zeros(t_scene.shape, dtype=np.uint16)
    quantized = np.clip(np.floor(t_scene[valid] / intr.depth_scale + 0.5),
                        0, 65535)
    units[valid] = quantized.astype(np.uint16)

    img = DepthImage(units, intr)
    floor_mask = floor_wins & np.isfinite(t_floor) & (units > 0)

    # plane z = floor_height, normal world-down, mapped to camera frame:
    # n_cam = R^T n_world, d_cam = d_world + n_world . C
    n_cam = rot.T @ np.array([0.0, 0.0, -1.0])
    d_cam = spec.floor_height - cam[2]
    plane = PlaneModel.from_normal_d(n_cam, d_cam)
    return img, plane, floor_mask
