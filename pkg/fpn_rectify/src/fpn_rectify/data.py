"""Loading raw/ground-truth frame pairs out of a dataset manifest."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataio import Intrinsics, read_depth_png, read_manifest


@dataclass(frozen=True)
class FramePair:
    name: str
    raw_path: Path
    gt_path: Path


def _resolve(path_text: str, manifest_dir: Path) -> Path:
    # The manifest records paths as they were given on the command line:
    # absolute, or relative to the directory generate-gt ran from. Try
    # them as-is first, then relative to the manifest for relocated sets.
    path = Path(path_text)
    if path.exists():
        return path
    if not path.is_absolute() and (manifest_dir / path).exists():
        return manifest_dir / path
    raise ValueError(f"manifest references missing file: {path_text}")


def load_dataset(manifest_path: str | Path) -> tuple[Intrinsics, list[FramePair]]:
    """Read a ground-truth manifest into intrinsics plus usable pairs.

    Only entries with status "ok" become pairs (skipped / failed frames
    have no ground-truth image). Relative paths resolve as written
    first, then against the manifest's directory. Raises ValueError
    when no entry is usable.
    """
    manifest_path = Path(manifest_path)
    manifest_dir = manifest_path.parent
    _, entries = read_manifest(manifest_path)

    pairs = []
    intrinsics_ref = "intrinsics.json"
    for entry in entries:
        if entry.get("status") != "ok":
            continue
        intrinsics_ref = entry.get("intrinsics_ref", intrinsics_ref)
        raw = _resolve(entry["raw_path"], manifest_dir)
        gt = _resolve(entry["gt_path"], manifest_dir)
        pairs.append(FramePair(name=gt.name, raw_path=raw, gt_path=gt))
    if not pairs:
        raise ValueError(f"no usable pairs in {manifest_path}")

    intr = Intrinsics.from_json(manifest_dir / intrinsics_ref)
    return intr, pairs


def load_pair_arrays(pairs: list[FramePair]) -> tuple[np.ndarray, np.ndarray]:
    """Stack pairs into (raw, gt) float32 unit arrays of shape (N, H, W)."""
    raw = np.stack([read_depth_png(p.raw_path) for p in pairs])
    gt = np.stack([read_depth_png(p.gt_path) for p in pairs])
    return raw.astype(np.float32), gt.astype(np.float32)
