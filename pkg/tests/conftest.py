"""Shared scene builders for the test suite.

Three synthetic families cover the behaviors under test:

- forward: robot-style view, camera ~0.8 m up pitched ~12 deg down onto a
  4 m floor whose outer half curls up to 0.08 m. Floor normal is near the
  camera Y axis. The curl is a gentle monotone ramp, so the strict stage
  tends to capture it with a slightly tilted plane.
- rim: straight-down view from 5 m onto a 2.5 m floor disk; the visible
  curl forms a symmetric ring no tilted plane can hug, so the strict
  stage anchors to the flat core and the curl shows up as strongly
  one-sided mass. Floor normal is near the camera Z axis.
- flat_exact: straight-down view of a flat floor at an integer number of
  depth units; every unprojected point has bit-identical z, so the cloud
  is exactly coplanar.
- wall: a level camera facing a box face, with the floor out of view;
  no plane satisfies a Y-axis constraint.
"""

from __future__ import annotations

import numpy as np

from tofplane import (CameraIntrinsics, CameraPose, ClutterBox, RansacConfig,
                      SceneSpec, render_scene)

INTRINSICS = dict(fx=140.0, fy=140.0, cx=80.0, cy=60.0,
                  width=160, height=120, depth_scale=0.001)


def make_intrinsics(**overrides) -> CameraIntrinsics:
    return CameraIntrinsics(**{**INTRINSICS, **overrides})


def forward_scene(seed=0, bow=0.08, sigma=0.005, pitch=12.0, height=0.8,
                  clutter=(), profile="quadratic", intr=None):
    intr = intr or make_intrinsics()
    pose = CameraPose(position=(0.0, 0.0, height), pitch_deg=pitch)
    spec = SceneSpec(floor_height=0.0, bow_amplitude=bow, bow_profile=profile,
                     noise_sigma=sigma, extent=4.0, clutter=clutter, seed=seed)
    return render_scene(spec, intr, pose) + (spec, pose)


def forward_configs(iterations=500, seed=0):
    loose = RansacConfig(0.1, 20.0, axis=(0, 1, 0), iterations=iterations,
                         seed=seed)
    tight = RansacConfig(0.03, 15.0, axis=(0, 1, 0), iterations=iterations,
                         seed=seed + 1)
    return loose, tight


def rim_scene(seed=0, bow=0.09, sigma=0.002, height=5.0, extent=2.5,
              clutter=(), profile="quadratic", intr=None):
    intr = intr or make_intrinsics()
    pose = CameraPose(position=(0.0, 0.0, height), pitch_deg=90.0)
    spec = SceneSpec(floor_height=0.0, bow_amplitude=bow, bow_profile=profile,
                     noise_sigma=sigma, extent=extent, clutter=clutter,
                     seed=seed)
    return render_scene(spec, intr, pose) + (spec, pose)


def rim_configs(iterations=500, seed=0, tight_th=0.01):
    loose = RansacConfig(0.1, 20.0, axis=(0, 0, 1), iterations=iterations,
                         seed=seed)
    tight = RansacConfig(tight_th, 15.0, axis=(0, 0, 1), iterations=iterations,
                         seed=seed + 1)
    return loose, tight


def flat_exact_scene(seed=0, height=2.0, intr=None):
    """Straight-down flat floor at an exact unit count: coplanar cloud."""
    intr = intr or make_intrinsics()
    pose = CameraPose(position=(0.0, 0.0, height), pitch_deg=90.0)
    spec = SceneSpec(floor_height=0.0, bow_amplitude=0.0, noise_sigma=0.0,
                     extent=6.0, seed=seed)
    return render_scene(spec, intr, pose) + (spec, pose)


def wall_scene(seed=0, intr=None):
    """Level view of a box face with no floor in the frustum."""
    intr = intr or make_intrinsics()
    pose = CameraPose(position=(0.0, 0.0, 2.0), pitch_deg=0.0)
    wall = ClutterBox(min_corner=(-6.0, 2.9, -3.0), max_corner=(6.0, 3.1, 6.0))
    spec = SceneSpec(floor_height=0.0, bow_amplitude=0.0, noise_sigma=0.0,
                     extent=1.0, clutter=(wall,), seed=seed)
    return render_scene(spec, intr, pose) + (spec, pose)


def random_cloud_near_plane(rng: np.random.Generator, n: int, axis, spread):
    """Noisy plane-ish cloud plus outliers, for RANSAC stress tests."""
    axis = np.asarray(axis, dtype=np.float64)
    pts = rng.uniform(-2, 2, size=(n, 3))
    offset = rng.uniform(1.0, 3.0)
    dist = pts @ axis - offset
    pts -= np.outer(dist * (1 - spread), axis)  # squash toward the plane
    return pts


def write_frame_dir(directory, frames):
    """Write {name: DepthImage} as PNGs plus a shared intrinsics.json."""
    from tofplane import write_depth_png, write_intrinsics_json

    directory.mkdir(parents=True, exist_ok=True)
    intr = next(iter(frames.values())).intrinsics
    write_intrinsics_json(directory / "intrinsics.json", intr)
    for name, img in frames.items():
        write_depth_png(directory / name, img)
    return directory
