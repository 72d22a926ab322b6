"""Encoder-decoder segmentation architectures at configurable toy scale.

Three variants share the same contracting path: a plain U-shaped network
with skip concatenations, a gated variant whose skips pass through additive
soft attention (coefficients in [0, 1], exposed for inspection), and a
nested variant whose skip lattice re-convolves intermediate feature maps at
every depth (nested-level class scores exposed). Convolutions are padded,
so for input H x W with both divisible by 2^depth the class scores come
back H x W x classes.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .errors import ShapeError

ARCHITECTURES = ("unet", "attention_unet", "unetpp")


@dataclass(frozen=True)
class ModelConfig:
    architecture: str = "unet"
    depth: int = 3
    base_channels: int = 8
    classes: int = 4

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.depth < 2:
            raise ValueError("depth must be >= 2")
        if self.base_channels < 4:
            raise ValueError("base_channels must be >= 4")
        if self.classes < 2:
            raise ValueError("classes must be >= 2")


class DoubleConv(nn.Module):
    """Two padded 3x3 conv + batchnorm + ReLU stages."""

    def __init__(self, cin: int, cout: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(cin, cout, 3, padding=1),
            nn.BatchNorm2d(cout),
            nn.ReLU(inplace=True),
            nn.Conv2d(cout, cout, 3, padding=1),
            nn.BatchNorm2d(cout),
            nn.ReLU(inplace=True),
        )

    def forward(self, x):
        return self.net(x)


def _check_divisible(x: torch.Tensor, depth: int) -> None:
    h, w = x.shape[-2], x.shape[-1]
    if h % (1 << depth) or w % (1 << depth):
        raise ShapeError(f"input {h}x{w} not divisible by 2^{depth}")


class UNet(nn.Module):
    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        chans = [cfg.base_channels * 2**i for i in range(cfg.depth + 1)]
        self.encoders = nn.ModuleList()
        cin = 1
        for c in chans[:-1]:
            self.encoders.append(DoubleConv(cin, c))
            cin = c
        self.bottleneck = DoubleConv(chans[-2], chans[-1])
        self.ups = nn.ModuleList(
            nn.ConvTranspose2d(c * 2, c, 2, stride=2) for c in reversed(chans[:-1])
        )
        self.decoders = nn.ModuleList(
            DoubleConv(c * 2, c) for c in reversed(chans[:-1])
        )
        self.head = nn.Conv2d(cfg.base_channels, cfg.classes, 1)

    def forward(self, x):
        _check_divisible(x, self.cfg.depth)
        skips = []
        for enc in self.encoders:
            x = enc(x)
            skips.append(x)
            x = F.max_pool2d(x, 2)
        x = self.bottleneck(x)
        for up, dec, skip in zip(self.ups, self.decoders, reversed(skips)):
            x = dec(torch.cat([skip, up(x)], dim=1))
        return self.head(x)


class AttentionGate(nn.Module):
    """Additive soft attention over a skip connection.

    The gating signal (decoder state) and the skip features project into a
    shared space; a sigmoid squashes their combined response to [0, 1] and
    rescales the skip features pixelwise.
    """

    def __init__(self, channels: int):
        super().__init__()
        inter = max(channels // 2, 1)
        self.w_gate = nn.Conv2d(channels, inter, 1)
        self.w_skip = nn.Conv2d(channels, inter, 1)
        self.response = nn.Conv2d(inter, 1, 1)

    def forward(self, gate, skip):
        mix = F.relu(self.w_gate(gate) + self.w_skip(skip))
        alpha = torch.sigmoid(self.response(mix))
        return skip * alpha, alpha


class AttentionUNet(nn.Module):
    """U-shaped network with gated skips; gate maps kept from the last forward."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        chans = [cfg.base_channels * 2**i for i in range(cfg.depth + 1)]
        self.encoders = nn.ModuleList()
        cin = 1
        for c in chans[:-1]:
            self.encoders.append(DoubleConv(cin, c))
            cin = c
        self.bottleneck = DoubleConv(chans[-2], chans[-1])
        rev = list(reversed(chans[:-1]))
        self.ups = nn.ModuleList(nn.ConvTranspose2d(c * 2, c, 2, stride=2) for c in rev)
        self.gates = nn.ModuleList(AttentionGate(c) for c in rev)
        self.decoders = nn.ModuleList(DoubleConv(c * 2, c) for c in rev)
        self.head = nn.Conv2d(cfg.base_channels, cfg.classes, 1)
        self.last_gate_maps: list[torch.Tensor] = []

    def forward(self, x, return_gates: bool = False):
        _check_divisible(x, self.cfg.depth)
        skips = []
        for enc in self.encoders:
            x = enc(x)
            skips.append(x)
            x = F.max_pool2d(x, 2)
        x = self.bottleneck(x)
        gate_maps = []
        for up, gate, dec, skip in zip(self.ups, self.gates, self.decoders,
                                       reversed(skips)):
            g = up(x)
            gated, alpha = gate(g, skip)
            gate_maps.append(alpha)
            x = dec(torch.cat([gated, g], dim=1))
        self.last_gate_maps = [a.detach() for a in gate_maps]
        out = self.head(x)
        if return_gates:
            return out, gate_maps
        return out


class UNetPP(nn.Module):
    """Nested skip lattice; intermediate class scores exposed per nesting level."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        chans = [cfg.base_channels * 2**i for i in range(cfg.depth + 1)]
        self.chans = chans
        self.nodes = nn.ModuleDict()
        for i in range(cfg.depth + 1):
            cin = 1 if i == 0 else chans[i - 1]
            self.nodes[f"x_{i}_0"] = DoubleConv(cin, chans[i])
        self.ups = nn.ModuleDict()
        for j in range(1, cfg.depth + 1):
            for i in range(cfg.depth + 1 - j):
                self.ups[f"u_{i}_{j}"] = nn.ConvTranspose2d(
                    chans[i + 1], chans[i], 2, stride=2
                )
                cin = chans[i] * j + chans[i]
                self.nodes[f"x_{i}_{j}"] = DoubleConv(cin, chans[i])
        self.heads = nn.ModuleList(
            nn.Conv2d(chans[0], cfg.classes, 1) for _ in range(cfg.depth)
        )

    def forward(self, x, return_all: bool = False):
        _check_divisible(x, self.cfg.depth)
        grid: dict[tuple[int, int], torch.Tensor] = {}
        for i in range(self.cfg.depth + 1):
            inp = x if i == 0 else F.max_pool2d(grid[(i - 1, 0)], 2)
            grid[(i, 0)] = self.nodes[f"x_{i}_0"](inp)
        for j in range(1, self.cfg.depth + 1):
            for i in range(self.cfg.depth + 1 - j):
                below = self.ups[f"u_{i}_{j}"](grid[(i + 1, j - 1)])
                cat = torch.cat([grid[(i, k)] for k in range(j)] + [below], dim=1)
                grid[(i, j)] = self.nodes[f"x_{i}_{j}"](cat)
        level_outputs = [
            head(grid[(0, j + 1)]) for j, head in enumerate(self.heads)
        ]
        if return_all:
            return level_outputs[-1], level_outputs
        return level_outputs[-1]


def build_model(cfg: ModelConfig) -> nn.Module:
    if cfg.architecture == "unet":
        return UNet(cfg)
    if cfg.architecture == "attention_unet":
        return AttentionUNet(cfg)
    return UNetPP(cfg)


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
