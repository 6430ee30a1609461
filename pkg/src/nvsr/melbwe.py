"""Mel-domain bandwidth extension: cutoff detection and band prediction.

The band-limited input carries energy only up to some mel band c. A cutoff
mask marks the live bands, and a predictor fills the dead ones. The built-in
predictor replicates the energy at the cutoff band into every dead band,
frame by frame:

    Y = M * X + (1 - M) * (X[:, c] outer ones)

Both sides of the combination act elementwise. External predictors plug in
through the MELF file exchange.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np

from .dsp import MelSpectrogram
from .melf import ExchangeClient

CUTOFF_THRESHOLD_DB = 40.0
_TINY = 1e-20


@dataclass(frozen=True)
class CutoffMask:
    """T x F binary matrix that is 1 for bands <= c and 0 above."""

    c: int
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=np.float64)
        if mask.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
        n_bands = mask.shape[1]
        if not (0 <= self.c < n_bands):
            raise ValueError(f"cutoff band {self.c} outside [0, {n_bands})")
        row = (np.arange(n_bands) <= self.c).astype(np.float64)
        if not np.array_equal(mask, np.broadcast_to(row, mask.shape)):
            raise ValueError("mask rows must be 1 up to band c and 0 above")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)

    @property
    def n_frames(self) -> int:
        return self.mask.shape[0]

    @property
    def n_bands(self) -> int:
        return self.mask.shape[1]


def build_mask(c: int, n_frames: int, n_bands: int) -> CutoffMask:
    """Binary mask with ones in bands 0..c of every frame."""
    if not (0 <= c < n_bands):
        raise ValueError(f"cutoff band {c} outside [0, {n_bands})")
    if n_frames < 0:
        raise ValueError("n_frames must be >= 0")
    row = (np.arange(n_bands) <= c).astype(np.float64)
    return CutoffMask(c=c, mask=np.tile(row, (n_frames, 1)))


def detect_cutoff_band(
    mel: MelSpectrogram, threshold_db: float = CUTOFF_THRESHOLD_DB
) -> int:
    """Index of the highest mel band still within ``threshold_db`` of the peak.

    Band level is the dB of time-averaged band power; mel values are
    magnitude-weighted sums, so they are squared first. The relative threshold
    makes the result invariant to input scaling. An all-zero input has no
    spectral cliff, so the full band count is assumed and a warning is emitted.
    """
    if mel.scale != "linear":
        raise ValueError("cutoff detection expects linear-scale mel energies")
    if mel.n_frames < 1:
        raise ValueError("cutoff detection needs at least one frame")
    energies = mel.energies
    n_bands = energies.shape[1]
    if not np.any(energies > 0):
        warnings.warn("all-zero mel spectrogram; assuming full bandwidth")
        return n_bands - 1
    level_db = 10.0 * np.log10((energies**2).mean(axis=0) + _TINY)
    live = level_db > level_db.max() - threshold_db
    return int(np.nonzero(live)[0][-1])


def pad_predict(mel: MelSpectrogram, mask: CutoffMask) -> MelSpectrogram:
    """Replicate the cutoff band's energy into every band above it."""
    if mel.scale != "linear":
        raise ValueError("pad_predict expects linear-scale mel energies")
    x = mel.energies
    if mask.mask.shape != x.shape:
        raise ValueError(f"mask shape {mask.mask.shape} != mel shape {x.shape}")
    m = mask.mask
    replicated = np.broadcast_to(x[:, mask.c : mask.c + 1], x.shape)
    out = m * x + (1.0 - m) * replicated
    return MelSpectrogram(
        out,
        window_len=mel.window_len,
        frame_hop=mel.frame_hop,
        sample_rate=mel.sample_rate,
        scale=mel.scale,
    )


def external_predict(
    mel: MelSpectrogram,
    exchange_dir: str | os.PathLike,
    timeout_s: float = 60.0,
) -> MelSpectrogram:
    """Delegate prediction to an external process via the MELF exchange.

    One request/response pair per call; not reentrant for a shared directory.
    """
    return ExchangeClient(exchange_dir, timeout_s=timeout_s).request(mel)
