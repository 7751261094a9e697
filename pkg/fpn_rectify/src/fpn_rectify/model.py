"""Feature-pyramid depth rectifier.

A small fully-convolutional encoder-decoder: a four-scale bottom-up
convolutional encoder, 1x1 lateral connections onto a shared pyramid
width, a top-down path that upsamples and adds, and a full-resolution
head emitting one sigmoid channel (normalized depth). Input is the
normalized depth map replicated to three channels; any input size works
because every stage is convolutional and the top-down path upsamples to
the exact lateral shapes.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

ENCODER_WIDTHS = (16, 32, 64, 96)
PYRAMID_WIDTH = 48


class _ConvBlock(nn.Module):
    """Two 3x3 convolutions with ReLU; the first carries the stride."""

    def __init__(self, cin: int, cout: int, stride: int = 1):
        super().__init__()
        self.conv1 = nn.Conv2d(cin, cout, 3, stride=stride, padding=1)
        self.conv2 = nn.Conv2d(cout, cout, 3, padding=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.relu(self.conv2(F.relu(self.conv1(x))))


class PyramidRectifier(nn.Module):
    """FPN mapping (B, 3, H, W) normalized depth to (B, 1, H, W)."""

    def __init__(self):
        super().__init__()
        w1, w2, w3, w4 = ENCODER_WIDTHS
        self.enc1 = _ConvBlock(3, w1, stride=1)
        self.enc2 = _ConvBlock(w1, w2, stride=2)
        self.enc3 = _ConvBlock(w2, w3, stride=2)
        self.enc4 = _ConvBlock(w3, w4, stride=2)
        self.lat1 = nn.Conv2d(w1, PYRAMID_WIDTH, 1)
        self.lat2 = nn.Conv2d(w2, PYRAMID_WIDTH, 1)
        self.lat3 = nn.Conv2d(w3, PYRAMID_WIDTH, 1)
        self.lat4 = nn.Conv2d(w4, PYRAMID_WIDTH, 1)
        self.smooth3 = nn.Conv2d(PYRAMID_WIDTH, PYRAMID_WIDTH, 3, padding=1)
        self.smooth2 = nn.Conv2d(PYRAMID_WIDTH, PYRAMID_WIDTH, 3, padding=1)
        self.smooth1 = nn.Conv2d(PYRAMID_WIDTH, PYRAMID_WIDTH, 3, padding=1)
        self.head = nn.Sequential(
            nn.Conv2d(PYRAMID_WIDTH, 32, 3, padding=1),
            nn.ReLU(),
            nn.Conv2d(32, 1, 1),
        )

    @staticmethod
    def _merge(lateral: torch.Tensor, top: torch.Tensor) -> torch.Tensor:
        return lateral + F.interpolate(top, size=lateral.shape[-2:],
                                       mode="nearest")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        c1 = self.enc1(x)
        c2 = self.enc2(c1)
        c3 = self.enc3(c2)
        c4 = self.enc4(c3)
        p4 = self.lat4(c4)
        p3 = self.smooth3(self._merge(self.lat3(c3), p4))
        p2 = self.smooth2(self._merge(self.lat2(c2), p3))
        p1 = self.smooth1(self._merge(self.lat1(c1), p2))
        return torch.sigmoid(self.head(p1))


def make_model() -> PyramidRectifier:
    return PyramidRectifier()


def count_parameters(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
