"""Training loop: fit the pyramid rectifier to raw/ground-truth pairs.

Each step normalizes the raw depth into [0, 1], replicates it to three
channels, runs the network, scales the sigmoid output back to depth
units, and evaluates the 3D loss against the ground-truth map — so the
network is optimized in metric space, not pixel space. Checkpoints are
written atomically (temp file + rename).
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .data import load_dataset, load_pair_arrays
from .dataio import Intrinsics
from .losses import DEFAULT_SCALE_S, batch_total_loss
from .model import count_parameters, make_model


@dataclass(frozen=True)
class TrainConfig:
    """Everything one training run depends on."""

    manifest: str
    checkpoint: str
    epochs: int = 30
    batch_size: int = 8
    learning_rate: float = 1e-3
    scale_s: float = DEFAULT_SCALE_S
    max_depth: int = 10000
    seed: int = 0
    limit: int | None = None  # cap the pair count, for quick runs

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if not 0 < self.max_depth <= 65535:
            raise ValueError("max_depth must be in (0, 65535]")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


def save_checkpoint(path: str | Path, model: torch.nn.Module,
                    cfg: TrainConfig, loss_history: list[float]) -> None:
    """Atomically persist model weights plus the run's configuration."""
    path = Path(path)
    payload = {
        "model_state": model.state_dict(),
        "config": asdict(cfg),
        "max_depth": cfg.max_depth,
        "loss_history": loss_history,
    }
    tmp = path.with_name(path.name + ".tmp")
    torch.save(payload, tmp)
    os.replace(tmp, path)


def load_checkpoint(path: str | Path) -> tuple[torch.nn.Module, dict]:
    """Rebuild the model from a checkpoint; returns (model, payload)."""
    payload = torch.load(Path(path), map_location="cpu", weights_only=True)
    model = make_model()
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, payload


def train(cfg: TrainConfig) -> dict:
    """Run the full loop and write the checkpoint.

    Returns a summary dict with the parameter count and per-epoch mean
    loss history. Raises ValueError when the manifest yields no pairs.
    """
    torch.manual_seed(cfg.seed)
    intr, pairs = load_dataset(cfg.manifest)
    if cfg.limit is not None:
        pairs = pairs[:cfg.limit]
    raw_np, gt_np = load_pair_arrays(pairs)
    raw = torch.from_numpy(raw_np)
    gt = torch.from_numpy(gt_np)

    model = make_model()
    n_params = count_parameters(model)
    print(f"model parameters: {n_params}")
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    shuffle_rng = np.random.default_rng(cfg.seed)

    history: list[float] = []
    n = len(pairs)
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(n)
        epoch_sum, batches = 0.0, 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            x = (raw[idx].clamp(0, cfg.max_depth) / cfg.max_depth)
            x3 = x.unsqueeze(1).repeat(1, 3, 1, 1)
            pred_units = model(x3)[:, 0] * cfg.max_depth
            loss = batch_total_loss(gt[idx], pred_units, intr, s=cfg.scale_s)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_sum += float(loss.detach())
            batches += 1
        history.append(epoch_sum / batches)
        print(f"epoch {epoch + 1}/{cfg.epochs} loss={history[-1]:.6g}")

    save_checkpoint(cfg.checkpoint, model, cfg, history)
    return {"parameters": n_params, "loss_history": history,
            "checkpoint": str(cfg.checkpoint), "pairs": n,
            "intrinsics": intr.to_dict()}
