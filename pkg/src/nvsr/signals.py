"""Deterministic synthetic test signals: noise, tones, and speech-like audio.

The speech-like generator alternates voiced (harmonic stack under a formant
envelope) and unvoiced (shaped noise burst) segments. Its long-term spectrum
peaks in the low hundreds of Hz and stays within roughly 25 dB of that peak
out to 20 kHz, so a band-limiting cutoff remains the dominant spectral cliff.
"""
from __future__ import annotations

import numpy as np

from .dsp import SAMPLE_RATE, Waveform

_FORMANTS_HZ = (500.0, 1500.0, 2500.0, 3600.0)
_FORMANT_BW_HZ = (90.0, 160.0, 220.0, 280.0)


def white_noise(
    duration_s: float = 1.0,
    sample_rate: int = SAMPLE_RATE,
    seed: int = 0,
    amplitude: float = 0.3,
) -> Waveform:
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate))
    return Waveform(amplitude * rng.standard_normal(n), sample_rate)


def sine(
    freq_hz: float,
    duration_s: float = 1.0,
    sample_rate: int = SAMPLE_RATE,
    amplitude: float = 0.5,
    phase: float = 0.0,
) -> Waveform:
    if not (0 < freq_hz < sample_rate / 2):
        raise ValueError(f"frequency {freq_hz} outside (0, Nyquist)")
    t = np.arange(int(round(duration_s * sample_rate))) / sample_rate
    return Waveform(amplitude * np.sin(2 * np.pi * freq_hz * t + phase), sample_rate)


def _formant_envelope(freqs: np.ndarray) -> np.ndarray:
    env = np.zeros_like(freqs)
    for f0, bw in zip(_FORMANTS_HZ, _FORMANT_BW_HZ):
        env += np.exp(-0.5 * ((freqs - f0) / bw) ** 2)
    # Gentle tilt keeps harmonics audible into the top octaves.
    tilt = (1.0 + freqs / 600.0) ** -0.8
    return env + 0.35 * tilt


def _voiced_segment(n: int, sample_rate: int, rng: np.random.Generator) -> np.ndarray:
    f0_start = rng.uniform(90.0, 230.0)
    f0_end = f0_start * rng.uniform(0.85, 1.18)
    f_inst = np.linspace(f0_start, f0_end, n)
    phase = 2 * np.pi * np.cumsum(f_inst) / sample_rate
    max_harmonic = int((0.47 * sample_rate) / max(f0_start, f0_end))
    k = np.arange(1, max_harmonic + 1)
    amps = _formant_envelope(k * (f0_start + f0_end) / 2) / np.sqrt(k)
    phases = rng.uniform(0, 2 * np.pi, size=max_harmonic)
    sig = (amps[None, :] * np.sin(phase[:, None] * k[None, :] + phases[None, :])).sum(
        axis=1
    )
    return sig / (np.abs(sig).max() + 1e-12)


def _unvoiced_segment(n: int, sample_rate: int, rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal(n)
    spec = np.fft.rfft(noise)
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    center = rng.uniform(4500.0, 9000.0)
    shape = np.exp(-0.5 * ((freqs - center) / 3500.0) ** 2) + 0.08
    sig = np.fft.irfft(spec * shape, n=n)
    return 0.5 * sig / (np.abs(sig).max() + 1e-12)


def speech_like(
    duration_s: float = 2.0,
    sample_rate: int = SAMPLE_RATE,
    seed: int = 0,
    amplitude: float = 0.5,
) -> Waveform:
    """Speech-shaped signal alternating voiced and fricative-like segments."""
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate))
    out = np.zeros(n)
    pos = 0
    while pos < n:
        seg_len = int(rng.uniform(0.08, 0.22) * sample_rate)
        end = min(pos + seg_len, n)
        m = end - pos
        if m < 32:
            break
        if rng.random() < 0.65:
            seg = _voiced_segment(m, sample_rate, rng)
        else:
            seg = _unvoiced_segment(m, sample_rate, rng)
        ramp = min(int(0.01 * sample_rate), m // 4)
        if ramp > 0:
            fade = 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
            seg[:ramp] *= fade
            seg[-ramp:] *= fade[::-1]
        out[pos:end] = seg * rng.uniform(0.5, 1.0)
        pos = end
    peak = np.abs(out).max()
    if peak > 0:
        out *= amplitude / peak
    return Waveform(out, sample_rate)
