"""On-the-fly training pairs: degraded vs. full-band log-mel crops."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .audio import (
    SAMPLE_RATE,
    degrade,
    detect_cutoff_band,
    mel_spectrogram,
    pad_bands,
    read_wav,
    to_log,
)


class CropDataset:
    """Draws (input, target) log-mel crops with a random cutoff per draw.

    The input branch mirrors what the predictor sees at serve time: degrade
    the waveform, take its mel spectrogram, replicate the detected cutoff
    band upward, then log-compress. Targets are cached full-band log mels.
    """

    def __init__(
        self,
        wav_paths: list[Path],
        crop_frames: int,
        cutoff_min_hz: float,
        cutoff_max_hz: float,
    ):
        if not wav_paths:
            raise ValueError("empty dataset")
        if crop_frames < 1:
            raise ValueError("crop_frames must be positive")
        if not (0 < cutoff_min_hz <= cutoff_max_hz < SAMPLE_RATE / 2):
            raise ValueError(
                f"cutoff range [{cutoff_min_hz}, {cutoff_max_hz}] outside (0, Nyquist)"
            )
        self.crop_frames = crop_frames
        self.cutoff_min_hz = cutoff_min_hz
        self.cutoff_max_hz = cutoff_max_hz
        self.waves = []
        self.target_logmels = []
        for p in wav_paths:
            samples, rate = read_wav(p)
            if rate != SAMPLE_RATE:
                raise ValueError(f"{p}: expected {SAMPLE_RATE} Hz input, got {rate}")
            if len(samples) < 1:
                raise ValueError(f"{p}: empty waveform")
            self.waves.append(samples)
            self.target_logmels.append(to_log(mel_spectrogram(samples)))

    def __len__(self) -> int:
        return len(self.waves)

    def _crop(self, x: np.ndarray, y: np.ndarray, rng: np.random.Generator):
        t = x.shape[0]
        c = self.crop_frames
        if t >= c:
            start = int(rng.integers(0, t - c + 1))
            return x[start : start + c], y[start : start + c]
        reps = math.ceil(c / t)
        return np.tile(x, (reps, 1))[:c], np.tile(y, (reps, 1))[:c]

    def draw(self, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        i = int(rng.integers(0, len(self.waves)))
        cutoff = float(rng.uniform(self.cutoff_min_hz, self.cutoff_max_hz))
        degraded_mel = mel_spectrogram(degrade(self.waves[i], cutoff))
        padded = pad_bands(degraded_mel, detect_cutoff_band(degraded_mel))
        return self._crop(to_log(padded), self.target_logmels[i], rng)

    def draw_batch(self, batch_size: int, rng: np.random.Generator):
        pairs = [self.draw(rng) for _ in range(batch_size)]
        x = np.stack([p[0] for p in pairs])[:, None]
        y = np.stack([p[1] for p in pairs])[:, None]
        return x.astype(np.float32), y.astype(np.float32)


def collect_wavs(data: str | Path) -> list[Path]:
    """WAV paths from a directory (recursive) or a manifest file."""
    data = Path(data)
    if data.is_dir():
        paths = sorted(data.rglob("*.wav"))
    else:
        root = data.parent
        paths = []
        for raw in data.read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            rel = line.split("\t")[0].strip()
            paths.append(root / rel)
    if not paths:
        raise ValueError(f"no WAV files found under {data}")
    return paths
