"""Batch command-line front-end.

Subcommands:
  simulate     render synthetic scenes from a spec file into depth PNGs
  generate-gt  rectify raw frames into planar-floor ground truth + manifest
  evaluate     curvature-gradient histograms for one or two frame sets
  losses       loss table for filename-paired frames across two sets

Every run is reproducible: flags (or a saved config) plus the inputs
determine the outputs byte for byte. Exit codes: 0 success, 1 semantic
failure (no usable data), 2 usage or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .geometry import CameraIntrinsics, depth_to_pointcloud
from .imgio import (read_depth_png, read_intrinsics_json, write_depth_png,
                    write_intrinsics_json)
from .metrics import (DEFAULT_SCALE_S, CurvatureReport, evaluate_plane_set,
                      loss_components)
from .pipeline import STATUS_OK, build_dataset
from .ransac import (LOOSE_MAX_ANGLE, LOOSE_THRESHOLD, TIGHT_MAX_ANGLE,
                     TIGHT_THRESHOLD, RansacConfig)
from .synth import CameraPose, SceneSpec, render_scene

EXIT_OK = 0
EXIT_NO_DATA = 1
EXIT_USAGE = 2

_HIST_BAR_WIDTH = 40


@dataclass
class RunConfig:
    """Fully serializable description of one CLI run."""

    command: str
    input: str | None = None
    input_b: str | None = None
    output: str | None = None
    intrinsics: str | None = None
    loose_th: float = LOOSE_THRESHOLD
    loose_angle: float = LOOSE_MAX_ANGLE
    tight_th: float | None = None  # None: loose_th scaled by the stage ratio
    tight_angle: float | None = None
    iterations: int = 1000
    seed: int = 0
    scale_s: float = DEFAULT_SCALE_S
    jobs: int | None = None
    axis: str = "0,1,0"

    def loose_config(self) -> RansacConfig:
        return RansacConfig(self.loose_th, self.loose_angle,
                            axis=_parse_axis(self.axis),
                            iterations=self.iterations, seed=self.seed)

    def tight_config(self) -> RansacConfig:
        th = self.tight_th
        angle = self.tight_angle
        if th is None:
            th = self.loose_th * (TIGHT_THRESHOLD / LOOSE_THRESHOLD)
        if angle is None:
            angle = self.loose_angle * (TIGHT_MAX_ANGLE / LOOSE_MAX_ANGLE)
        return RansacConfig(th, angle, axis=_parse_axis(self.axis),
                            iterations=self.iterations, seed=self.seed + 1)


def _parse_axis(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError("axis must be three comma-separated numbers")
    return (parts[0], parts[1], parts[2])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tofplane",
        description="Planar rectification toolkit for ToF depth images")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--config", help="JSON run config; flags override it")
        p.add_argument("--save-config", help="write the effective config here")
        p.add_argument("--input", help="input directory or spec file")
        p.add_argument("--output", help="output directory")
        p.add_argument("--intrinsics", help="intrinsics JSON path "
                       "(default: <input>/intrinsics.json)")
        p.add_argument("--loose-th", type=float, dest="loose_th",
                       help="permissive-stage inlier distance")
        p.add_argument("--loose-angle", type=float, dest="loose_angle",
                       help="permissive-stage max normal-to-axis angle, degrees")
        p.add_argument("--tight-th", type=float, dest="tight_th",
                       help="strict-stage inlier distance")
        p.add_argument("--tight-angle", type=float, dest="tight_angle",
                       help="strict-stage max normal-to-axis angle, degrees")
        p.add_argument("--iterations", type=int, help="RANSAC rounds per stage")
        p.add_argument("--seed", type=int, help="global RNG seed")
        p.add_argument("--scale-s", type=float, dest="scale_s",
                       help="total-loss scale hyperparameter")
        p.add_argument("--jobs", type=int, help="parallel frame workers")
        p.add_argument("--axis", help="constraint axis, e.g. '0,1,0'")

    p_sim = sub.add_parser("simulate", help="render synthetic depth frames")
    add_common(p_sim)
    p_gt = sub.add_parser("generate-gt", help="build rectified ground truth")
    add_common(p_gt)
    p_eval = sub.add_parser("evaluate", help="curvature-gradient report")
    add_common(p_eval)
    p_eval.add_argument("--input-b", dest="input_b",
                        help="second frame set to compare against")
    p_loss = sub.add_parser("losses", help="loss table for paired frames")
    add_common(p_loss)
    p_loss.add_argument("--input-b", dest="input_b",
                        help="second (predicted) frame set")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then config-file values, then explicit flags."""
    cfg = RunConfig(command=args.command)
    if getattr(args, "config", None):
        loaded = json.loads(Path(args.config).read_text())
        loaded.pop("command", None)
        for key, value in loaded.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    for key in ("input", "input_b", "output", "intrinsics", "loose_th",
                "loose_angle", "tight_th", "tight_angle", "iterations",
                "seed", "scale_s", "jobs", "axis"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def _require(cfg: RunConfig, *fields: str) -> None:
    for name in fields:
        if getattr(cfg, name) is None:
            raise ValueError(f"--{name.replace('_', '-')} is required")


def _resolve_intrinsics(cfg: RunConfig, search_dir: Path) -> CameraIntrinsics:
    path = Path(cfg.intrinsics) if cfg.intrinsics else search_dir / "intrinsics.json"
    return read_intrinsics_json(path)


def _list_frames(directory: Path) -> list[str]:
    if not directory.is_dir():
        raise OSError(f"not a directory: {directory}")
    return sorted(p.name for p in directory.glob("*.png")
                  if not p.name.endswith(".mask.png"))  # simulator sidecars


def cmd_simulate(cfg: RunConfig) -> int:
    _require(cfg, "input", "output")
    spec_doc = json.loads(Path(cfg.input).read_text())
    scenes = spec_doc.get("scenes", [])
    if not scenes:
        raise ValueError("spec file lists no scenes")
    if cfg.intrinsics:
        intr = read_intrinsics_json(cfg.intrinsics)
    elif "intrinsics" in spec_doc:
        intr = CameraIntrinsics.from_dict(spec_doc["intrinsics"])
    else:
        raise ValueError("no intrinsics in spec file or --intrinsics flag")

    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    write_intrinsics_json(out / "intrinsics.json", intr)

    for i, entry in enumerate(scenes):
        entry = dict(entry)
        name = entry.pop("name", f"frame_{i:04d}")
        pose = CameraPose.from_dict(entry.pop("camera"))
        spec = SceneSpec.from_dict(entry)
        img, plane, mask = render_scene(spec, intr, pose)
        write_depth_png(out / f"{name}.png", img)
        _write_mask_png(out / f"{name}.mask.png", mask)
        sidecar = {
            "plane": {"a": plane.a, "b": plane.b, "c": plane.c, "d": plane.d},
            "floor_pixels": int(mask.sum()),
            "camera": pose.to_dict(),
            "scene": spec.to_dict(),
        }
        (out / f"{name}.floor.json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
        print(f"{name}.png: rendered ({int(mask.sum())} floor px)")
    return EXIT_OK


def _write_mask_png(path: Path, mask: np.ndarray) -> None:
    from PIL import Image
    Image.fromarray((mask * np.uint8(255)), mode="L").save(str(path), format="PNG")


def cmd_generate_gt(cfg: RunConfig) -> int:
    _require(cfg, "input", "output")
    manifest = build_dataset(
        cfg.input, cfg.output, cfg.loose_config(), cfg.tight_config(),
        global_seed=cfg.seed, jobs=cfg.jobs,
        intrinsics_path=cfg.intrinsics)
    for entry in manifest.entries:
        name = Path(entry["raw_path"]).name
        detail = f" ({entry['detail']})" if "detail" in entry else ""
        print(f"{name}: {entry['status']}{detail}")
    n_ok = manifest.count(STATUS_OK)
    print(f"{n_ok}/{len(manifest.entries)} frames rectified")
    return EXIT_OK if n_ok else EXIT_NO_DATA


def _load_set(cfg: RunConfig, directory: Path):
    names = _list_frames(directory)
    if not names:
        raise OSError(f"no depth images found in {directory}")
    intr = _resolve_intrinsics(cfg, directory)
    frames = [read_depth_png(directory / n, intr) for n in names]
    return names, frames


def _histogram_text(report: CurvatureReport) -> list[str]:
    lines = []
    peak = max(int(report.histogram.max()), 1)
    for i, count in enumerate(report.histogram):
        lo, hi = i / 10, (i + 1) / 10
        closer = ")" if i < 9 else "]"
        bar = "#" * int(round(_HIST_BAR_WIDTH * int(count) / peak))
        lines.append(f"  [{lo:.1f},{hi:.1f}{closer} {bar} {int(count)}")
    return lines


def _report_summary(label: str, report: CurvatureReport) -> list[str]:
    lines = [
        f"set {label}: {len(report.per_plane)} planes, "
        f"{len(report.skipped)} skipped, "
        f"mean curv_grad {report.mean:.4f}, std {report.std_dev:.4f}"
    ]
    lines += _histogram_text(report)
    return lines


def _write_plane_records(path: Path, report: CurvatureReport) -> None:
    lines = [json.dumps(rec, sort_keys=True) for rec in report.per_plane]
    lines += [json.dumps({"frame_id": rec["frame_id"], "skipped": rec["reason"]},
                         sort_keys=True) for rec in report.skipped]
    path.write_text("\n".join(lines) + "\n" if lines else "")


def cmd_evaluate(cfg: RunConfig) -> int:
    _require(cfg, "input", "output")
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    loose, tight = cfg.loose_config(), cfg.tight_config()

    names_a, frames_a = _load_set(cfg, Path(cfg.input))
    report_a = evaluate_plane_set(frames_a, loose, tight, frame_ids=names_a,
                                  jobs=cfg.jobs)
    _write_plane_records(out / "curvature_a.jsonl", report_a)
    summary = {"a": report_a.to_dict()}
    text = _report_summary("A", report_a)

    report_b = None
    if cfg.input_b:
        names_b, frames_b = _load_set(cfg, Path(cfg.input_b))
        report_b = evaluate_plane_set(frames_b, loose, tight, frame_ids=names_b,
                                      jobs=cfg.jobs)
        _write_plane_records(out / "curvature_b.jsonl", report_b)
        summary["b"] = report_b.to_dict()
        delta = (report_b.histogram - report_a.histogram).tolist()
        summary["delta_histogram"] = delta
        summary["delta_mean"] = report_b.mean - report_a.mean
        text += _report_summary("B", report_b)
        text.append("delta per bin (B - A): "
                    + " ".join(f"{d:+d}" for d in delta))
        text.append(f"delta mean (B - A): {report_b.mean - report_a.mean:+.4f}")

    (out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (out / "summary.txt").write_text("\n".join(text) + "\n")
    print("\n".join(text))

    evaluated = [r for r in (report_a, report_b) if r is not None]
    if any(len(r.per_plane) == 0 for r in evaluated):
        return EXIT_NO_DATA
    return EXIT_OK


def _paired_losses(name: str, dir_a: Path, dir_b: Path,
                   intr_a: CameraIntrinsics, intr_b: CameraIntrinsics,
                   s: float) -> dict:
    cloud_a = depth_to_pointcloud(read_depth_png(dir_a / name, intr_a))
    cloud_b = depth_to_pointcloud(read_depth_png(dir_b / name, intr_b))
    # match points by source pixel: both clouds are sparse subsets of the grid
    flat_a = cloud_a.pixel_index[:, 1] * intr_a.width + cloud_a.pixel_index[:, 0]
    flat_b = cloud_b.pixel_index[:, 1] * intr_b.width + cloud_b.pixel_index[:, 0]
    _, ia, ib = np.intersect1d(flat_a, flat_b, assume_unique=True,
                               return_indices=True)
    if len(ia) == 0:
        return {"frame": name, "error": "no comparable points"}
    breakdown = loss_components(cloud_a.take(ia), cloud_b.take(ib), s=s)
    rec = {"frame": name, "pixel_count": int(len(ia))}
    rec.update(breakdown.to_dict())
    return rec


def cmd_losses(cfg: RunConfig) -> int:
    _require(cfg, "input", "input_b")
    dir_a, dir_b = Path(cfg.input), Path(cfg.input_b)
    names_a, names_b = set(_list_frames(dir_a)), set(_list_frames(dir_b))
    if not names_a or not names_b:
        raise OSError("both input directories must contain depth images")
    paired = sorted(names_a & names_b)
    for name in sorted(names_a - names_b):
        print(f"unmatched in {dir_a}: {name}")
    for name in sorted(names_b - names_a):
        print(f"unmatched in {dir_b}: {name}")

    intr_a = _resolve_intrinsics(cfg, dir_a)
    intr_b = intr_a
    if not cfg.intrinsics and (dir_b / "intrinsics.json").exists():
        intr_b = read_intrinsics_json(dir_b / "intrinsics.json")

    records = [_paired_losses(n, dir_a, dir_b, intr_a, intr_b, cfg.scale_s)
               for n in paired]
    scored = [r for r in records if "error" not in r]

    header = (f"{'frame':<28} {'loss_x':>12} {'loss_y':>12} {'loss_z':>12} "
              f"{'loss_rmse':>12} {'total':>14}")
    print(header)
    for rec in records:
        if "error" in rec:
            print(f"{rec['frame']:<28} {rec['error']}")
        else:
            print(f"{rec['frame']:<28} {rec['loss_x']:>12.6g} "
                  f"{rec['loss_y']:>12.6g} {rec['loss_z']:>12.6g} "
                  f"{rec['loss_rmse']:>12.6g} {rec['total']:>14.6g}")

    summary = {}
    if scored:
        for key in ("loss_x", "loss_y", "loss_z", "loss_rmse", "total"):
            summary[f"mean_{key}"] = float(np.mean([r[key] for r in scored]))
        print("mean " + " ".join(f"{k.split('_', 1)[1]}={v:.6g}"
                                 for k, v in summary.items()))
    summary["pairs_scored"] = len(scored)
    summary["pairs_total"] = len(paired)
    summary["unmatched_a"] = sorted(names_a - names_b)
    summary["unmatched_b"] = sorted(names_b - names_a)

    if cfg.output:
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "losses.jsonl").write_text(
            "\n".join(json.dumps(r, sort_keys=True) for r in records)
            + ("\n" if records else ""))
        (out / "losses_summary.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if scored else EXIT_NO_DATA


_DISPATCH = {
    "simulate": cmd_simulate,
    "generate-gt": cmd_generate_gt,
    "evaluate": cmd_evaluate,
    "losses": cmd_losses,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if getattr(args, "save_config", None):
            Path(args.save_config).write_text(
                json.dumps(asdict(cfg), indent=2, sort_keys=True) + "\n")
        return _DISPATCH[cfg.command](cfg)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
