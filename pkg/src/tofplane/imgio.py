"""Reading and writing 16-bit depth PNGs, intrinsics JSON, and manifests.

File formats:
  - Depth image: single-channel 16-bit PNG. Pixel value is depth in integer
    units (multiply by depth_scale for meters); 0 marks an invalid pixel.
  - Intrinsics: JSON object with keys fx, fy, cx, cy, width, height,
    depth_scale.
  - Dataset manifest: JSON Lines. First line is a header object with a
    "version" key; each following line describes one frame.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from .geometry import CameraIntrinsics, DepthImage

MANIFEST_VERSION = 1


def write_depth_png(path: str | Path, img: DepthImage) -> None:
    """Write a depth image as single-channel 16-bit PNG."""
    pil = Image.fromarray(img.data.astype(np.uint16))  # uint16 -> mode I;16
    pil.save(str(path), format="PNG")


def read_depth_png(path: str | Path, intr: CameraIntrinsics) -> DepthImage:
    """Read a single-channel 16-bit PNG as a depth image."""
    with Image.open(str(path)) as pil:
        if pil.mode not in ("I;16", "I;16B", "I", "L"):
            raise ValueError(f"unsupported PNG mode {pil.mode!r} for depth data")
        data = np.asarray(pil, dtype=np.int64)
    if data.ndim != 2:
        raise ValueError("depth PNG must be single-channel")
    if np.any(data < 0) or np.any(data > 65535):
        raise ValueError("depth PNG values out of 16-bit range")
    return DepthImage(data.astype(np.uint16), intr)


def write_intrinsics_json(path: str | Path, intr: CameraIntrinsics) -> None:
    Path(path).write_text(json.dumps(intr.to_dict(), indent=2, sort_keys=True) + "\n")


def read_intrinsics_json(path: str | Path) -> CameraIntrinsics:
    return CameraIntrinsics.from_dict(json.loads(Path(path).read_text()))


def write_manifest(path: str | Path, entries: list[dict]) -> None:
    """Write a JSONL manifest: header line, then one entry per line."""
    lines = [json.dumps({"version": MANIFEST_VERSION}, sort_keys=True)]
    lines += [json.dumps(e, sort_keys=True) for e in entries]
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path: str | Path) -> tuple[dict, list[dict]]:
    """Read a JSONL manifest, returning (header, entries)."""
    raw = Path(path).read_text().strip()
    if not raw:
        return {"version": MANIFEST_VERSION}, []
    lines = raw.split("\n")
    header = json.loads(lines[0])
    if "version" not in header:
        raise ValueError("manifest missing version header")
    entries = [json.loads(ln) for ln in lines[1:]]
    return header, entries
