"""Shared fixtures: the trainer is exercised against datasets produced by
the tofplane CLI running as a subprocess — files and exit codes only, no
imports from the toolkit.
"""

from __future__ import annotations

import importlib.util
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest


def _installed(name: str) -> bool:
    try:
        return importlib.util.find_spec(name) is not None
    except ModuleNotFoundError:
        return False


# Skip this whole directory when the trainer or torch is absent, so the
# dataset toolkit's suite stays runnable on its own. The probe targets a
# submodule because the bare source checkout is visible as an empty
# namespace package even when fpn_rectify is not installed.
_HAVE_DEPS = _installed("torch") and _installed("fpn_rectify.dataio")
collect_ignore_glob = [] if _HAVE_DEPS else ["test_*.py"]

if _HAVE_DEPS:
    import fpn_rectify

# 64x64 straight-down camera: the ground footprint half-width is
# 32 * height / fx ~ 2.2 m, inside the 2.5 m floor disk, so frames are
# floor almost wall-to-wall with the curl zone (r > 1.25 m) well sampled.
INTRINSICS_64 = {"fx": 72.0, "fy": 72.0, "cx": 32.0, "cy": 32.0,
                 "width": 64, "height": 64, "depth_scale": 0.001}

# Matching extraction settings for straight-down frames: floor normal is
# camera +Z, thresholds in meters.
RIM_EVAL_FLAGS = ("--axis", "0,0,1", "--loose-th", "0.1", "--tight-th",
                  "0.01", "--loose-angle", "20", "--tight-angle", "15",
                  "--iterations", "300", "--seed", "7", "--jobs", "4")

TOY_INTRINSICS = {"fx": 36.0, "fy": 36.0, "cx": 16.0, "cy": 16.0,
                  "width": 32, "height": 32, "depth_scale": 0.001}


def run_tofplane(*args: object) -> subprocess.CompletedProcess:
    """Invoke the dataset toolkit's CLI in a subprocess."""
    return subprocess.run(
        [sys.executable, "-m", "tofplane.cli", *map(str, args)],
        capture_output=True, text=True)


def check_tofplane(*args: object) -> subprocess.CompletedProcess:
    res = run_tofplane(*args)
    assert res.returncode == 0, \
        f"tofplane {args[0]} failed ({res.returncode}):\n{res.stderr}{res.stdout}"
    return res


def rim_scenes(count: int, first_seed: int, prefix: str) -> list[dict]:
    """Bowed-floor scenes seen straight-down, varied in curl and height."""
    amplitudes = (0.06, 0.075, 0.09)
    heights = (4.9, 5.0, 5.1)
    return [
        {
            "name": f"{prefix}_{i:04d}",
            "camera": {"position": [0.0, 0.0, heights[i % 3]],
                       "pitch_deg": 90.0},
            "floor_height": 0.0,
            "bow_amplitude": amplitudes[i % 3],
            "bow_profile": "quadratic",
            "noise_sigma": 0.002,
            "extent": 2.5,
            "seed": first_seed + i,
        }
        for i in range(count)
    ]


def simulate(out_dir: Path, scenes: list[dict]) -> None:
    spec_path = out_dir.parent / f"{out_dir.name}_spec.json"
    spec_path.write_text(json.dumps(
        {"intrinsics": INTRINSICS_64, "scenes": scenes}))
    check_tofplane("simulate", "--input", spec_path, "--output", out_dir)


@pytest.fixture(scope="session")
def rim_dataset(tmp_path_factory) -> dict:
    """200 training pairs plus 50 held-out raw frames, built via the CLI."""
    root = tmp_path_factory.mktemp("rim_dataset")
    train_raw = root / "train_raw"
    train_gt = root / "train_gt"
    held_raw = root / "held_raw"

    simulate(train_raw, rim_scenes(200, first_seed=0, prefix="pair"))
    simulate(held_raw, rim_scenes(50, first_seed=5000, prefix="held"))
    res = check_tofplane("generate-gt", "--input", train_raw,
                         "--output", train_gt, *RIM_EVAL_FLAGS)
    assert "200/200 frames rectified" in res.stdout
    return {
        "root": root,
        "train_raw": train_raw,
        "train_gt": train_gt,
        "held_raw": held_raw,
        "manifest": train_gt / "manifest.jsonl",
    }


def write_toy_dataset(root: Path, count: int = 3) -> dict:
    """Tiny handmade raw/gt pairs: a flat map whose center square is
    pushed toward the camera in the raw frame. No toolkit involved."""
    raw_dir = root / "raw"
    gt_dir = root / "gt"
    raw_dir.mkdir(parents=True)
    gt_dir.mkdir(parents=True)
    intr = fpn_rectify.Intrinsics.from_dict(TOY_INTRINSICS)
    intr.write_json(raw_dir / "intrinsics.json")
    intr.write_json(gt_dir / "intrinsics.json")

    entries = []
    for i in range(count):
        name = f"toy_{i}.png"
        gt = np.full((32, 32), 3000 + 50 * i, dtype=np.uint16)
        raw = gt.copy()
        raw[10:22, 10:22] -= 150
        fpn_rectify.write_depth_png(raw_dir / name, raw)
        fpn_rectify.write_depth_png(gt_dir / name, gt)
        entries.append({"raw_path": str(raw_dir / name),
                        "gt_path": str(gt_dir / name),
                        "intrinsics_ref": "intrinsics.json",
                        "seed": i, "status": "ok"})
    entries.append({"raw_path": str(raw_dir / "nope.png"),
                    "gt_path": str(gt_dir / "nope.png"),
                    "intrinsics_ref": "intrinsics.json",
                    "seed": 99, "status": "skipped_no_plane"})

    manifest = gt_dir / "manifest.jsonl"
    lines = [json.dumps({"version": 1})]
    lines += [json.dumps(e, sort_keys=True) for e in entries]
    manifest.write_text("\n".join(lines) + "\n")
    return {"raw": raw_dir, "gt": gt_dir, "manifest": manifest,
            "names": [f"toy_{i}.png" for i in range(count)]}


@pytest.fixture()
def toy_dataset(tmp_path) -> dict:
    return write_toy_dataset(tmp_path)
