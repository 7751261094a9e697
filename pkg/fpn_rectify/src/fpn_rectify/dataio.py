"""On-disk formats shared with the rectification toolkit.

The trainer talks to the toolkit exclusively through files: 16-bit
single-channel depth PNGs (pixel value = depth in integer units, 0 =
invalid), an intrinsics JSON ({fx, fy, cx, cy, width, height,
depth_scale}), and the JSONL dataset manifest a ground-truth run writes
(header line with a "version" key, then one entry per frame). Nothing in
this package imports the toolkit itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole parameters: +X right, +Y down, +Z forward, z-depth stored."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int
    depth_scale: float

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0 or self.depth_scale <= 0:
            raise ValueError("fx, fy and depth_scale must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")

    def to_dict(self) -> dict:
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy,
                "width": self.width, "height": self.height,
                "depth_scale": self.depth_scale}

    @classmethod
    def from_dict(cls, d: dict) -> "Intrinsics":
        return cls(fx=float(d["fx"]), fy=float(d["fy"]),
                   cx=float(d["cx"]), cy=float(d["cy"]),
                   width=int(d["width"]), height=int(d["height"]),
                   depth_scale=float(d["depth_scale"]))

    @classmethod
    def from_json(cls, path: str | Path) -> "Intrinsics":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def read_depth_png(path: str | Path) -> np.ndarray:
    """Read a single-channel 16-bit PNG into a (H, W) uint16 array."""
    with Image.open(str(path)) as pil:
        if pil.mode not in ("I;16", "I;16B", "I", "L"):
            raise ValueError(f"unsupported PNG mode {pil.mode!r} for depth data")
        data = np.asarray(pil, dtype=np.int64)
    if data.ndim != 2:
        raise ValueError("depth PNG must be single-channel")
    if np.any(data < 0) or np.any(data > 65535):
        raise ValueError("depth PNG values out of 16-bit range")
    return data.astype(np.uint16)


def write_depth_png(path: str | Path, units: np.ndarray) -> None:
    """Write a (H, W) array of integer depth units as a 16-bit PNG."""
    Image.fromarray(np.asarray(units).astype(np.uint16)).save(
        str(path), format="PNG")


def list_depth_frames(directory: str | Path) -> list[str]:
    """Depth frame filenames in a dataset directory, lexicographic.

    Skips ``*.mask.png`` — the scene simulator's 8-bit sidecars that sit
    next to real frames.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise OSError(f"not a directory: {directory}")
    return sorted(p.name for p in directory.glob("*.png")
                  if not p.name.endswith(".mask.png"))


def normalize_depth(units: np.ndarray, max_depth: int) -> np.ndarray:
    """Map integer depth units into [0, 1] float32, clipping at max_depth."""
    if max_depth <= 0:
        raise ValueError("max_depth must be positive")
    return (np.clip(units, 0, max_depth) / float(max_depth)).astype(np.float32)


def denormalize_depth(norm: np.ndarray, max_depth: int) -> np.ndarray:
    """Invert normalize_depth back to uint16 units (half-up rounding)."""
    if max_depth <= 0:
        raise ValueError("max_depth must be positive")
    units = np.floor(np.clip(norm, 0.0, 1.0) * float(max_depth) + 0.5)
    return np.clip(units, 0, 65535).astype(np.uint16)


def read_manifest(path: str | Path) -> tuple[dict, list[dict]]:
    """Parse a JSONL dataset manifest into (header, entries)."""
    raw = Path(path).read_text().strip()
    if not raw:
        raise ValueError("empty manifest")
    lines = raw.split("\n")
    header = json.loads(lines[0])
    if "version" not in header:
        raise ValueError("manifest missing version header")
    return header, [json.loads(ln) for ln in lines[1:]]
