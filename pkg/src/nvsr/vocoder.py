"""Phaseless synthesis: Griffin-Lim over the mel pseudo-inverse.

Synthesis recovers linear magnitudes from mel energies by non-negative least
squares, then iterates Griffin-Lim with momentum to estimate phase. The
waveform synthesizer hides behind a small config so an external neural
vocoder can replace it without touching callers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import (
    SAMPLE_RATE,
    ComplexSpectrogram,
    MagSpectrogram,
    MelFilterbank,
    MelSpectrogram,
    Waveform,
    istft,
    mel_pseudo_inverse,
    mel_to_linear,
    stft,
)

GL_ITERS = 32
GL_MOMENTUM = 0.99
PEAK_CEILING = 0.999
_EPS = 1e-16


@dataclass(frozen=True)
class VocoderConfig:
    """Reference synthesizer settings.

    ``label`` names the implementation in evaluation reports, so results
    produced by a drop-in external vocoder stay distinguishable.
    """

    gl_iterations: int = GL_ITERS
    momentum: float = GL_MOMENTUM
    output_rate: int = SAMPLE_RATE
    peak_norm: bool = True
    label: str = "griffinlim"

    def __post_init__(self):
        if self.gl_iterations < 0:
            raise ValueError("gl_iterations must be >= 0")
        if not (0.0 <= self.momentum < 1.0):
            raise ValueError(f"momentum {self.momentum} outside [0, 1)")
        if self.output_rate <= 0:
            raise ValueError("output_rate must be positive")


def griffin_lim(
    mags: MagSpectrogram,
    n_iters: int = GL_ITERS,
    momentum: float = GL_MOMENTUM,
) -> Waveform:
    """Iterative phase estimation with momentum acceleration.

    Deterministic. Zero iterations reduce to the zero-phase inverse
    transform. Iterative runs start from a linear per-frame phase advance of
    2*pi*hop*k/window_len (the phase evolution of stationary bin-centered
    content); an all-equal-phase start would lock every frame identical and
    keep the reconstruction hop-periodic forever.
    """
    if n_iters < 0:
        raise ValueError("n_iters must be >= 0")
    if not (0.0 <= momentum < 1.0):
        raise ValueError(f"momentum {momentum} outside [0, 1)")
    m = mags.mags

    def _inverse(angles: np.ndarray) -> Waveform:
        return istft(
            ComplexSpectrogram(
                m * angles,
                window_len=mags.window_len,
                frame_hop=mags.frame_hop,
                sample_rate=mags.sample_rate,
            )
        )

    if n_iters == 0:
        return _inverse(np.ones(m.shape, dtype=np.complex128))
    t = np.arange(m.shape[0])[:, None]
    k = np.arange(m.shape[1])[None, :]
    angles = np.exp(2j * np.pi * mags.frame_hop * k * t / mags.window_len)
    rebuilt = 0.0
    for _ in range(n_iters):
        tprev = rebuilt
        rebuilt = stft(_inverse(angles), mags.window_len, mags.frame_hop).bins
        angles = rebuilt - (momentum / (1 + momentum)) * tprev
        angles = angles / (np.abs(angles) + _EPS)
    return _inverse(angles)


def peak_normalize(w: Waveform, ceiling: float = PEAK_CEILING) -> Waveform:
    """Scale down (never up) so the absolute peak stays at or below ceiling."""
    peak = float(np.max(np.abs(w.samples), initial=0.0))
    if peak <= ceiling:
        return w
    return Waveform(w.samples * (ceiling / peak), w.sample_rate)


def synthesize(
    mel: MelSpectrogram,
    fb: MelFilterbank,
    cfg: VocoderConfig = VocoderConfig(),
) -> Waveform:
    """Mel energies to waveform: NNLS magnitude recovery + Griffin-Lim."""
    if mel.sample_rate != cfg.output_rate:
        raise ValueError(
            f"mel sample rate {mel.sample_rate} != vocoder output rate {cfg.output_rate}"
        )
    linear = mel_to_linear(mel)
    mags = mel_pseudo_inverse(linear, fb)
    w = griffin_lim(mags, n_iters=cfg.gl_iterations, momentum=cfg.momentum)
    return peak_normalize(w) if cfg.peak_norm else w
