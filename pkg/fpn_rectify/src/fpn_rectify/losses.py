"""The training loss, computed in 3D: depth maps are unprojected to point
clouds through the pinhole intrinsics (differentiably) and compared there.

Components for a ground-truth / predicted pair, evaluated over pixels
valid (nonzero) in both maps:

    loss_x, loss_y, loss_z  per-axis mean squared differences (meters^2)
    loss_rmse               sqrt(mean((ln|z| - ln|z*|)^2)), scale-invariant
    total                   s * loss_rmse * |3 - e^loss_x - e^loss_y - e^loss_z|

This mirrors the evaluation toolkit's loss family bit-for-bit in float64,
which is what the cross-component agreement test pins down.
"""

from __future__ import annotations

import torch

from .dataio import Intrinsics

DEFAULT_SCALE_S = 100000.0


def unproject_depth(units: torch.Tensor, intr: Intrinsics) -> torch.Tensor:
    """Lift a (H, W) depth-unit map to (H, W, 3) camera-space points.

    Differentiable with respect to ``units``; invalid pixels produce the
    point (0, 0, 0), which callers mask out via the unit map itself.
    """
    if units.ndim != 2:
        raise ValueError("depth map must be 2-D")
    height, width = units.shape
    vv, uu = torch.meshgrid(
        torch.arange(height, dtype=units.dtype, device=units.device),
        torch.arange(width, dtype=units.dtype, device=units.device),
        indexing="ij")
    z = units * intr.depth_scale
    x = (uu - intr.cx) * z / intr.fx
    y = (vv - intr.cy) * z / intr.fy
    return torch.stack((x, y, z), dim=-1)


def loss_components(gt_units: torch.Tensor, pred_units: torch.Tensor,
                    intr: Intrinsics,
                    s: float = DEFAULT_SCALE_S) -> dict[str, torch.Tensor]:
    """Evaluate the loss family on a pair of depth-unit maps.

    Pixels where either map is exactly 0 are excluded. Raises ValueError
    on shape mismatch and ValueError("no comparable points") when nothing
    survives exclusion. All outputs are 0-dim tensors on the autograd
    graph of the inputs.
    """
    if gt_units.shape != pred_units.shape:
        raise ValueError("depth maps must have equal shape")
    keep = (gt_units != 0) & (pred_units != 0)
    if not bool(keep.any()):
        raise ValueError("no comparable points")

    gt_pts = unproject_depth(gt_units, intr)[keep]
    pred_pts = unproject_depth(pred_units, intr)[keep]

    axis_means = ((pred_pts - gt_pts) ** 2).mean(dim=0)
    loss_x, loss_y, loss_z = axis_means.unbind()
    log_diff = torch.log(pred_pts[:, 2].abs()) - torch.log(gt_pts[:, 2].abs())
    loss_rmse = torch.sqrt((log_diff**2).mean())
    total = s * loss_rmse * (
        3.0 - loss_x.exp() - loss_y.exp() - loss_z.exp()).abs()
    return {"loss_x": loss_x, "loss_y": loss_y, "loss_z": loss_z,
            "loss_rmse": loss_rmse, "total": total}


def batch_total_loss(gt_batch: torch.Tensor, pred_batch: torch.Tensor,
                     intr: Intrinsics,
                     s: float = DEFAULT_SCALE_S) -> torch.Tensor:
    """Mean combined loss over a (B, H, W) batch of map pairs.

    Frames with no comparable points are skipped; raises
    ValueError("no comparable points") when every frame is.
    """
    totals = []
    for gt, pred in zip(gt_batch, pred_batch):
        try:
            totals.append(loss_components(gt, pred, intr, s=s)["total"])
        except ValueError:
            continue
    if not totals:
        raise ValueError("no comparable points")
    return torch.stack(totals).mean()
