"""Batch rectification: raw depth frames to planar-floor ground truth.

Per frame: unproject, run the two-stage floor extraction, orthogonally
project every loose floor point onto the tight plane, and re-render the
cloud as a depth image. Non-floor points keep their exact coordinates
(index-set replacement, not set subtraction), so away from the floor the
output is bit-identical to the input except where a projected floor point
wins a z-buffer collision. Pixels vacated by moved floor points stay 0 —
holes are left honest rather than inpainted.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .geometry import CameraIntrinsics, DepthImage, depth_to_pointcloud, \
    pointcloud_to_depth, project_points_to_plane
from .imgio import MANIFEST_VERSION, read_depth_png, read_intrinsics_json, \
    write_depth_png, write_intrinsics_json, write_manifest
from .ransac import RansacConfig, stable_seed, two_stage_ground_extraction

STATUS_OK = "ok"
STATUS_SKIPPED = "skipped_no_plane"
STATUS_FAILED = "failed"


@dataclass
class DatasetManifest:
    """Frame-by-frame record of a ground-truth generation run."""

    entries: list[dict] = field(default_factory=list)
    version: int = MANIFEST_VERSION

    def count(self, status: str) -> int:
        return sum(1 for e in self.entries if e["status"] == status)


def rectify_frame(img: DepthImage, loose: RansacConfig,
                  tight: RansacConfig) -> DepthImage:
    """Flatten the extracted floor onto its tight plane and re-render.

    Propagates ValueError("no constrained plane found") /
    ValueError("degenerate input") from extraction when the frame has no
    usable floor.
    """
    cloud = depth_to_pointcloud(img)
    loose_idx, tight_plane = two_stage_ground_extraction(cloud, loose, tight)
    flattened = project_points_to_plane(cloud.take(loose_idx), tight_plane)
    rectified = cloud.with_points_replaced(loose_idx, flattened.points)
    return pointcloud_to_depth(rectified, img.intrinsics)


def _process_frame(name: str, input_dir: Path, output_dir: Path,
                   intr: CameraIntrinsics, loose: RansacConfig,
                   tight: RansacConfig, global_seed: int) -> dict:
    seed = stable_seed(global_seed, name)
    entry = {
        "raw_path": str(input_dir / name),
        "gt_path": str(output_dir / name),
        "intrinsics_ref": "intrinsics.json",
        "loose_cfg": replace(loose, seed=seed).to_dict(),
        "tight_cfg": replace(tight, seed=seed + 1).to_dict(),
        "seed": seed,
    }
    try:
        img = read_depth_png(input_dir / name, intr)
    except (OSError, ValueError) as exc:
        entry.update(status=STATUS_FAILED, detail=str(exc))
        return entry
    try:
        gt = rectify_frame(img, replace(loose, seed=seed),
                           replace(tight, seed=seed + 1))
    except ValueError as exc:
        entry.update(status=STATUS_SKIPPED, detail=str(exc))
        return entry
    write_depth_png(output_dir / name, gt)
    entry["status"] = STATUS_OK
    return entry


def build_dataset(
    input_dir: str | Path,
    output_dir: str | Path,
    loose: RansacConfig,
    tight: RansacConfig,
    global_seed: int = 0,
    jobs: int | None = None,
    intrinsics_path: str | Path | None = None,
) -> DatasetManifest:
    """Rectify every depth PNG in input_dir into output_dir with a manifest.

    Frames are listed lexicographically; per-frame seeds derive from
    (global_seed, filename) so the result is independent of processing
    order and parallelism. Unreadable frames get status "failed",
    floor-less frames "skipped_no_plane"; both leave the run alive.
    Raises ValueError when input_dir holds no depth images.
    """
    input_dir = Path(input_dir)
    output_dir = Path(output_dir)
    names = sorted(p.name for p in input_dir.glob("*.png")
                   if not p.name.endswith(".mask.png"))  # simulator sidecars
    if not names:
        raise ValueError(f"no depth images found in {input_dir}")
    if intrinsics_path is None:
        intrinsics_path = input_dir / "intrinsics.json"
    intr = read_intrinsics_json(intrinsics_path)

    output_dir.mkdir(parents=True, exist_ok=True)
    write_intrinsics_json(output_dir / "intrinsics.json", intr)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(_process_frame, name, input_dir, output_dir, intr,
                        loose, tight, global_seed)
            for name in names
        ]
        entries = [f.result() for f in futures]  # keeps lexicographic order

    manifest = DatasetManifest(entries=entries)
    write_manifest(output_dir / "manifest.jsonl", entries)
    return manifest
