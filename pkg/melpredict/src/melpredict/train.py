"""Training loop: Adam with linear warmup then per-epoch exponential decay."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch

from .data import CropDataset
from .model import ResUNet, ResUNetSpec, mae_loss, save_checkpoint


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 60
    batch_size: int = 8
    crop_frames: int = 256
    lr: float = 3e-4
    beta1: float = 0.5
    beta2: float = 0.999
    warmup_steps: int = 1000
    decay_per_epoch: float = 0.85
    cutoff_min_hz: float = 1000.0
    cutoff_max_hz: float = 16000.0
    seed: int = 0
    # With reshuffling off, every epoch replays the identical sequence of
    # (utterance, cutoff, crop) draws, so epoch-mean loss isolates learning
    # progress from sampling noise — useful for short desk-scale runs.
    reshuffle_each_epoch: bool = True

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if self.epochs < 1 or self.batch_size < 1 or self.crop_frames < 1:
            raise ValueError("epochs, batch_size and crop_frames must be positive")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be non-negative")
        if not (0 < self.decay_per_epoch <= 1):
            raise ValueError("decay_per_epoch must be in (0, 1]")
        if not (0 < self.cutoff_min_hz <= self.cutoff_max_hz < 22050):
            raise ValueError(
                f"cutoff range [{self.cutoff_min_hz}, {self.cutoff_max_hz}] "
                "outside (0, Nyquist)"
            )


def learning_rate(cfg: TrainConfig, global_step: int, epoch: int) -> float:
    """Closed-form schedule: linear warmup over global steps, then x decay^epoch."""
    warm = 1.0 if cfg.warmup_steps == 0 else min(1.0, global_step / cfg.warmup_steps)
    return cfg.lr * warm * cfg.decay_per_epoch**epoch


@dataclass
class TrainResult:
    checkpoint_path: Path
    curve_path: Path
    epoch_means: list[float] = field(default_factory=list)


def train(
    cfg: TrainConfig,
    wav_paths,
    out_dir,
    spec: ResUNetSpec = ResUNetSpec(),
    progress=None,
) -> TrainResult:
    """Train a predictor on 44.1 kHz waveforms; writes checkpoint + loss curve.

    The curve CSV has one row per optimizer step (epoch, global_step, lr, mae)
    so the realized learning-rate trace can be checked against the closed form.
    """
    if cfg.crop_frames % spec.stride != 0:
        raise ValueError(
            f"crop_frames {cfg.crop_frames} must be a multiple of the "
            f"encoder stride {spec.stride}"
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = CropDataset(
        list(wav_paths), cfg.crop_frames, cfg.cutoff_min_hz, cfg.cutoff_max_hz
    )
    torch.manual_seed(cfg.seed)
    model = ResUNet(spec)
    model.train()
    opt = torch.optim.Adam(model.parameters(), lr=0.0, betas=(cfg.beta1, cfg.beta2))
    steps_per_epoch = math.ceil(len(dataset) / cfg.batch_size)
    rows = ["epoch,global_step,lr,mae"]
    result = TrainResult(out_dir / "checkpoint.pt", out_dir / "curve.csv")
    global_step = 0
    for epoch in range(cfg.epochs):
        draw_seed = cfg.seed + (epoch + 1 if cfg.reshuffle_each_epoch else 1)
        rng = np.random.default_rng(draw_seed)
        losses = []
        for _ in range(steps_per_epoch):
            global_step += 1
            lr_now = learning_rate(cfg, global_step, epoch)
            for group in opt.param_groups:
                group["lr"] = lr_now
            x, y = dataset.draw_batch(cfg.batch_size, rng)
            loss = mae_loss(model(torch.from_numpy(x)), torch.from_numpy(y))
            opt.zero_grad()
            loss.backward()
            opt.step()
            losses.append(loss.detach().item())
            rows.append(f"{epoch},{global_step},{lr_now:.10e},{losses[-1]:.8f}")
        result.epoch_means.append(sum(losses) / len(losses))
        if progress:
            progress(
                f"epoch {epoch + 1}/{cfg.epochs}: mean MAE {result.epoch_means[-1]:.4f}"
            )
    result.curve_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    save_checkpoint(
        result.checkpoint_path, model, pad_input=True, extra={"train_config": asdict(cfg)}
    )
    return result
