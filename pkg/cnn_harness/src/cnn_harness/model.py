"""CNN over stacked connectivity tensors.

The network consumes a 10-band 32x32 tensor (channels-first) and emits a
40-way probability vector.  Convolutions are stride-1 with "same"
padding; batch normalization follows each max-pool; dropout 0.5 sits on
both dense layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .errors import ShapeError

N_CLASSES = 40
GRID = 32
CONV_CHANNELS = (32, 64, 128, 256)


@dataclass(frozen=True)
class ModelSpec:
    kernel_size: int = 3
    n_bands: int = 10

    def __post_init__(self):
        if self.kernel_size not in (3, 5):
            raise ShapeError(f"kernel size must be 3 or 5, "
                             f"got {self.kernel_size}")


class ConnectivityCnn(nn.Module):
    def __init__(self, spec: ModelSpec):
        super().__init__()
        self.spec = spec
        s = spec.kernel_size
        pad = s // 2
        c1, c2, c3, c4 = CONV_CHANNELS
        self.conv1 = nn.Conv2d(spec.n_bands, c1, s, padding=pad)
        self.conv2 = nn.Conv2d(c1, c2, s, padding=pad)
        self.pool1 = nn.MaxPool2d(2, 2)
        self.bn1 = nn.BatchNorm2d(c2)
        self.conv3 = nn.Conv2d(c2, c3, s, padding=pad)
        self.conv4 = nn.Conv2d(c3, c4, s, padding=pad)
        self.pool2 = nn.MaxPool2d(2, 2)
        self.bn2 = nn.BatchNorm2d(c4)
        self.drop = nn.Dropout(0.5)
        self.fc1 = nn.Linear((GRID // 4) ** 2 * c4, 256)
        self.fc2 = nn.Linear(256, N_CLASSES)
        self.relu = nn.ReLU()

    def _check(self, x: torch.Tensor) -> None:
        if x.ndim != 4 or x.shape[1:] != (self.spec.n_bands, GRID, GRID):
            raise ShapeError(
                f"expected input (batch, {self.spec.n_bands}, {GRID}, "
                f"{GRID}), got {tuple(x.shape)}")

    def _stages(self, x: torch.Tensor):
        """Yield the eight tabulated layer outputs in order."""
        x = self.relu(self.conv1(x))
        yield x
        x = self.relu(self.conv2(x))
        yield x
        x = self.bn1(self.pool1(x))
        yield x
        x = self.relu(self.conv3(x))
        yield x
        x = self.relu(self.conv4(x))
        yield x
        x = self.bn2(self.pool2(x))
        yield x
        x = self.relu(self.fc1(self.drop(torch.flatten(x, 1))))
        yield x
        yield self.fc2(self.drop(x))

    def logits(self, x: torch.Tensor) -> torch.Tensor:
        self._check(x)
        for out in self._stages(x):
            pass
        return out

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.logits(x), dim=1)


def build_model(spec: ModelSpec) -> ConnectivityCnn:
    return ConnectivityCnn(spec)


def shape_trace(model: ConnectivityCnn) -> list[tuple[int, ...]]:
    """Per-layer output shapes as (height, width, channels) tuples, dense
    layers as single-element tuples."""
    model.eval()
    x = torch.zeros(1, model.spec.n_bands, GRID, GRID)
    trace = []
    with torch.no_grad():
        for out in model._stages(x):
            if out.ndim == 4:
                _, c, h, w = out.shape
                trace.append((h, w, c))
            else:
                trace.append((out.shape[1],))
    return trace


def conv_parameter_count(model: ConnectivityCnn,
                         include_bias: bool = True) -> int:
    total = 0
    for m in model.modules():
        if isinstance(m, nn.Conv2d):
            total += m.weight.numel()
            if include_bias and m.bias is not None:
                total += m.bias.numel()
    return total


def parameter_count(model: ConnectivityCnn) -> int:
    return sum(p.numel() for p in model.parameters())
