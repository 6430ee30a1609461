"""Residual U-Net over log-mel spectrograms.

The network sees a (batch, 1, frames, bands) log-mel image and predicts an
additive residual, so an untrained net (zero-initialized output head) is an
exact identity map. Six encoder stages (average-pool 2x2) mirror six decoder
stages (transpose-conv 2x2) with skip concatenation at matching levels; every
stage stacks four ConvBlocks, each ConvBlock being two 3x3 convolutions with
batch normalization and leaky-ReLU.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

DEFAULT_CHANNELS = (32, 64, 128, 256, 384, 384)
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class ResUNetSpec:
    """Architecture hyperparameters; the defaults are the full-size model."""

    channels: tuple[int, ...] = DEFAULT_CHANNELS
    convblocks_per_stage: int = 4
    in_bands: int = 128

    def __post_init__(self):
        if len(self.channels) < 1 or any(c < 1 for c in self.channels):
            raise ValueError(f"bad channel plan {self.channels}")
        if self.convblocks_per_stage < 1:
            raise ValueError("need at least one ConvBlock per stage")
        if self.in_bands % self.stride != 0 or self.in_bands // self.stride < 1:
            raise ValueError(
                f"{self.in_bands} bands not divisible into {self.depth} poolings"
            )

    @property
    def depth(self) -> int:
        return len(self.channels)

    @property
    def stride(self) -> int:
        """Total time/band downsampling factor across the encoder."""
        return 2**self.depth


class ConvBlock(nn.Module):
    def __init__(self, c_in: int, c_out: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(c_in, c_out, 3, padding=1, bias=False),
            nn.BatchNorm2d(c_out),
            nn.LeakyReLU(0.01),
            nn.Conv2d(c_out, c_out, 3, padding=1, bias=False),
            nn.BatchNorm2d(c_out),
            nn.LeakyReLU(0.01),
        )

    def forward(self, x):
        return self.body(x)


def _stack(c_in: int, c_out: int, n_blocks: int) -> nn.Sequential:
    blocks = [ConvBlock(c_in, c_out)]
    blocks += [ConvBlock(c_out, c_out) for _ in range(n_blocks - 1)]
    return nn.Sequential(*blocks)


class EncoderStage(nn.Module):
    def __init__(self, c_in: int, c_out: int, n_blocks: int):
        super().__init__()
        self.blocks = _stack(c_in, c_out, n_blocks)
        self.pool = nn.AvgPool2d(2)

    def forward(self, x):
        skip = self.blocks(x)
        return self.pool(skip), skip


class DecoderStage(nn.Module):
    def __init__(self, c_in: int, c_skip: int, c_out: int, n_blocks: int):
        super().__init__()
        self.up = nn.ConvTranspose2d(c_in, c_skip, 2, stride=2)
        self.blocks = _stack(2 * c_skip, c_out, n_blocks)

    def forward(self, x, skip):
        return self.blocks(torch.cat([self.up(x), skip], dim=1))


class ResUNet(nn.Module):
    def __init__(self, spec: ResUNetSpec = ResUNetSpec()):
        super().__init__()
        self.spec = spec
        ch = spec.channels
        n = spec.convblocks_per_stage
        self.encoders = nn.ModuleList(
            EncoderStage(1 if i == 0 else ch[i - 1], ch[i], n)
            for i in range(spec.depth)
        )
        # Stage i consumes the previous decoder's output, which is ch[i] by
        # construction (stage i+1 emits ch[i]; the bottleneck emits ch[-1]).
        self.decoders = nn.ModuleList(
            DecoderStage(ch[i], ch[i], ch[i - 1] if i > 0 else ch[0], n)
            for i in reversed(range(spec.depth))
        )
        self.after = ConvBlock(ch[0], ch[0])
        self.head = nn.Conv2d(ch[0], 1, 3, padding=1)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.ndim != 4 or x.shape[1] != 1:
            raise ValueError(f"expected (B, 1, T, F) input, got {tuple(x.shape)}")
        if x.shape[3] != self.spec.in_bands:
            raise ValueError(f"expected {self.spec.in_bands} bands, got {x.shape[3]}")
        if x.shape[2] % self.spec.stride != 0:
            raise ValueError(
                f"frame count {x.shape[2]} not a multiple of {self.spec.stride}"
            )
        h = x
        skips = []
        for enc in self.encoders:
            h, skip = enc(h)
            skips.append(skip)
        for dec, skip in zip(self.decoders, reversed(skips)):
            h = dec(h, skip)
        return x + self.head(self.after(h))


def mae_loss(estimate: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Mean absolute error over all elements; shapes must match."""
    if estimate.shape != target.shape:
        raise ValueError(f"shape mismatch: {tuple(estimate.shape)} vs {tuple(target.shape)}")
    return torch.mean(torch.abs(estimate - target))


def predict_log_mel(model: ResUNet, mel_log: np.ndarray) -> np.ndarray:
    """Run one (T, F) log-mel matrix through the net, handling time padding.

    The time axis is reflection-padded up to a multiple of the encoder stride
    and the padding is stripped from the output.
    """
    if mel_log.ndim != 2:
        raise ValueError(f"need a (T, F) matrix, got shape {mel_log.shape}")
    t = mel_log.shape[0]
    if t < 1:
        raise ValueError("need at least one frame")
    stride = model.spec.stride
    pad = (-t) % stride
    x = torch.as_tensor(mel_log[None, None], dtype=torch.float32)
    if pad:
        # reflect needs pad < T; degenerate short inputs replicate instead
        mode = "reflect" if pad < t else "replicate"
        x = nn.functional.pad(x, (0, 0, 0, pad), mode=mode)
    was_training = model.training
    model.eval()
    with torch.no_grad():
        y = model(x)
    if was_training:
        model.train()
    return y[0, 0, :t].double().numpy()


def save_checkpoint(path, model: ResUNet, pad_input: bool = True, extra: dict | None = None):
    payload = {
        "version": CHECKPOINT_VERSION,
        "channels": list(model.spec.channels),
        "convblocks_per_stage": model.spec.convblocks_per_stage,
        "in_bands": model.spec.in_bands,
        "pad_input": bool(pad_input),
        "state_dict": model.state_dict(),
    }
    if extra:
        payload["extra"] = extra
    torch.save(payload, path)


def load_checkpoint(path) -> tuple[ResUNet, dict]:
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    if payload.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('version')}")
    spec = ResUNetSpec(
        channels=tuple(payload["channels"]),
        convblocks_per_stage=payload["convblocks_per_stage"],
        in_bands=payload["in_bands"],
    )
    model = ResUNet(spec)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    meta = {k: v for k, v in payload.items() if k != "state_dict"}
    return model, meta
