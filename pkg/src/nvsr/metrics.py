"""Log-spectral distance between magnitude spectrograms or waveforms."""
from __future__ import annotations

import numpy as np

from .dsp import MagSpectrogram, Waveform, stft

LSD_FLOOR = 1e-8


def lsd(ref: MagSpectrogram, est: MagSpectrogram, floor: float = LSD_FLOOR) -> float:
    """Mean over frames of the RMS over bins of the log power ratio.

    Both magnitude arrays are floored before the log, so silence against
    silence contributes zero distance.
    """
    a = ref.mags
    b = est.mags
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: ref {a.shape} vs est {b.shape}")
    if a.shape[0] == 0:
        raise ValueError("cannot compute distance over zero frames")
    a = np.maximum(a, floor)
    b = np.maximum(b, floor)
    ratio = np.log10(a**2 / b**2)
    return float(np.mean(np.sqrt(np.mean(ratio**2, axis=1))))


def lsd_waveforms(ref: Waveform, est: Waveform, floor: float = LSD_FLOOR) -> float:
    """LSD between two equal-rate waveforms; the shorter is zero-padded."""
    if ref.sample_rate != est.sample_rate:
        raise ValueError(
            f"sample rate mismatch: {ref.sample_rate} vs {est.sample_rate}"
        )
    n = max(len(ref), len(est))
    a = np.pad(ref.samples, (0, n - len(ref)))
    b = np.pad(est.samples, (0, n - len(est)))
    sr = ref.sample_rate
    return lsd(
        stft(Waveform(a, sr)).magnitude(),
        stft(Waveform(b, sr)).magnitude(),
        floor=floor,
    )
