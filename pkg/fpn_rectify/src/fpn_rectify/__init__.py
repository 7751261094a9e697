"""Learned planar depth rectification on top of the tofplane dataset format.

A small feature-pyramid network maps raw multipath-curled depth frames to
their rectified ground truth; training compares both sides as unprojected
point clouds under the same loss family the evaluation toolkit reports.
This package only touches the toolkit's on-disk formats (16-bit depth
PNGs, intrinsics JSON, the JSONL manifest) and its CLI — never its code.
"""

from .data import FramePair, load_dataset, load_pair_arrays
from .dataio import (Intrinsics, denormalize_depth, list_depth_frames,
                     normalize_depth, read_depth_png, read_manifest,
                     write_depth_png)
from .losses import (DEFAULT_SCALE_S, batch_total_loss, loss_components,
                     unproject_depth)
from .model import (ENCODER_WIDTHS, PYRAMID_WIDTH, PyramidRectifier,
                    count_parameters, make_model)
from .predict import predict
from .train import TrainConfig, load_checkpoint, save_checkpoint, train

__all__ = [
    "DEFAULT_SCALE_S",
    "ENCODER_WIDTHS",
    "FramePair",
    "Intrinsics",
    "PYRAMID_WIDTH",
    "PyramidRectifier",
    "TrainConfig",
    "batch_total_loss",
    "count_parameters",
    "denormalize_depth",
    "list_depth_frames",
    "load_checkpoint",
    "load_dataset",
    "load_pair_arrays",
    "loss_components",
    "make_model",
    "normalize_depth",
    "predict",
    "read_depth_png",
    "read_manifest",
    "save_checkpoint",
    "train",
    "unproject_depth",
    "write_depth_png",
]
