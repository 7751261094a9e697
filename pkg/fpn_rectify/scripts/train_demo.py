#!/usr/bin/env python3
"""End-to-end demo: simulate -> rectify -> train -> predict -> evaluate.

Uses the tofplane CLI (as a subprocess — the trainer never imports it)
to render a small curled-floor dataset and its rectified ground truth,
trains the pyramid rectifier for a few epochs, then shows the
curvature-gradient report for raw vs. predicted held-out frames.
Everything lands under --workdir for inspection.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
from pathlib import Path

from fpn_rectify import TrainConfig, predict, train

INTRINSICS = {"fx": 72.0, "fy": 72.0, "cx": 32.0, "cy": 32.0,
              "width": 64, "height": 64, "depth_scale": 0.001}

EVAL_FLAGS = ["--axis", "0,0,1", "--loose-th", "0.1", "--tight-th", "0.01",
              "--iterations", "300", "--seed", "7"]

AMPLITUDES = (0.06, 0.075, 0.09)
HEIGHTS = (4.9, 5.0, 5.1)


def build_spec(path: Path, count: int, first_seed: int, prefix: str) -> None:
    scenes = []
    for i in range(count):
        scenes.append({
            "name": f"{prefix}_{i:04d}",
            "camera": {"position": [0, 0, HEIGHTS[i % 3]], "pitch_deg": 90.0},
            "extent": 2.5,
            "bow_amplitude": AMPLITUDES[i % 3],
            "noise_sigma": 0.002,
            "seed": first_seed + i,
        })
    path.write_text(json.dumps({"intrinsics": INTRINSICS,
                                "scenes": scenes}, indent=2))


def tofplane(*argv: str) -> None:
    cmd = [sys.executable, "-m", "tofplane.cli", *argv]
    print("\n$ tofplane " + " ".join(argv))
    subprocess.run(cmd, check=True)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workdir", default="demo_output",
                    help="where to put frames, checkpoint, and reports")
    ap.add_argument("--pairs", type=int, default=24, help="training pairs")
    ap.add_argument("--held", type=int, default=8, help="held-out frames")
    ap.add_argument("--epochs", type=int, default=15)
    args = ap.parse_args()

    work = Path(args.workdir)
    work.mkdir(parents=True, exist_ok=True)
    train_spec = work / "train_spec.json"
    held_spec = work / "held_spec.json"
    build_spec(train_spec, args.pairs, first_seed=0, prefix="pair")
    build_spec(held_spec, args.held, first_seed=9000, prefix="held")

    raw, gt, held, pred = (work / "train_raw", work / "train_gt",
                           work / "held_raw", work / "held_pred")
    tofplane("simulate", "--input", str(train_spec), "--output", str(raw))
    tofplane("simulate", "--input", str(held_spec), "--output", str(held))
    tofplane("generate-gt", "--input", str(raw), "--output", str(gt),
             *EVAL_FLAGS)

    checkpoint = work / "rectifier.pt"
    summary = train(TrainConfig(manifest=str(gt / "manifest.jsonl"),
                                checkpoint=str(checkpoint),
                                epochs=args.epochs, batch_size=8,
                                max_depth=8000, seed=0))
    history = summary["loss_history"]
    print(f"\ntrained {summary['pairs']} pairs: "
          f"loss {history[0]:.3f} -> {history[-1]:.5f}")

    names = predict(checkpoint, held, pred)
    print(f"predicted {len(names)} held-out frames -> {pred}")

    report = work / "report"
    tofplane("evaluate", "--input", str(held), "--input-b", str(pred),
             "--output", str(report), *EVAL_FLAGS)
    doc = json.loads((report / "summary.json").read_text())
    print(f"\ncurvature gradient: raw mean {doc['a']['mean']:.4f} -> "
          f"predicted mean {doc['b']['mean']:.4f} "
          f"(delta {doc['delta_mean']:+.4f})")
    print(f"artifacts in {work}/: checkpoint, frames, report/summary.txt")
    return 0


if __name__ == "__main__":
    sys.exit(main())
