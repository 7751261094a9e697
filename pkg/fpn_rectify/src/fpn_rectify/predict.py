"""Inference: run a checkpoint over a frame directory, write depth PNGs.

Outputs land in the toolkit's dataset format (16-bit PNGs plus a copied
intrinsics.json), so the evaluation CLI consumes them directly.
"""

from __future__ import annotations

from pathlib import Path

import torch

from .dataio import (Intrinsics, denormalize_depth, list_depth_frames,
                     normalize_depth, read_depth_png, write_depth_png)
from .train import load_checkpoint


def predict(checkpoint: str | Path, input_dir: str | Path,
            output_dir: str | Path) -> list[str]:
    """Predict every frame in input_dir into output_dir; returns names.

    Raises FileNotFoundError for a missing checkpoint and ValueError for
    an empty input directory.
    """
    checkpoint = Path(checkpoint)
    if not checkpoint.exists():
        raise FileNotFoundError(f"missing checkpoint: {checkpoint}")
    model, payload = load_checkpoint(checkpoint)
    max_depth = int(payload["max_depth"])

    input_dir = Path(input_dir)
    names = list_depth_frames(input_dir)
    if not names:
        raise ValueError(f"no depth images found in {input_dir}")
    intr = Intrinsics.from_json(input_dir / "intrinsics.json")

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    intr.write_json(output_dir / "intrinsics.json")

    with torch.no_grad():
        for name in names:
            units = read_depth_png(input_dir / name)
            x = torch.from_numpy(normalize_depth(units, max_depth))
            x3 = x.unsqueeze(0).unsqueeze(0).repeat(1, 3, 1, 1)
            pred_norm = model(x3)[0, 0].numpy()
            write_depth_png(output_dir / name,
                            denormalize_depth(pred_norm, max_depth))
    return names
