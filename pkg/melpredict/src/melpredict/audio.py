"""Self-contained audio feature extraction and degradation.

This package talks to the nvsr toolkit only through files (WAV in, MELF
mel spectrograms over the exchange directory), so the feature conventions
are re-implemented here to the same published definitions: 44.1 kHz audio,
periodic Hann STFT with a 2048-sample window and 441-sample hop, 128
triangular mel bands on the 2595*log10(1 + f/700) axis, and natural-log
compression with a 1e-8 offset.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import signal
from scipy.io import wavfile

SAMPLE_RATE = 44100
WINDOW_LEN = 2048
HOP = 441
N_MELS = 128
LOG_EPS = 1e-8

CUTOFF_THRESHOLD_DB = 40.0
_TINY = 1e-20


def read_wav(path) -> tuple[np.ndarray, int]:
    """Mono float64 samples in [-1, 1] plus the sample rate."""
    rate, data = wavfile.read(path)
    if data.ndim == 2:
        data = data.mean(axis=1)
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    else:
        raise ValueError(f"{path}: unsupported WAV sample format {data.dtype}")
    return samples, int(rate)


@lru_cache(maxsize=4)
def _hann(window_len: int) -> np.ndarray:
    n = np.arange(window_len)
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / window_len)


def stft_mag(x: np.ndarray, window_len: int = WINDOW_LEN, hop: int = HOP) -> np.ndarray:
    """Magnitudes of ceil(len/hop) frames, frame t centered on sample t*hop."""
    n = x.shape[0]
    n_frames = -(-n // hop)
    k = window_len // 2 + 1
    if n_frames == 0:
        return np.zeros((0, k))
    pad = window_len // 2
    total = (n_frames - 1) * hop + window_len
    padded = np.zeros(total)
    padded[pad : pad + n] = x
    idx = np.arange(window_len)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = padded[idx] * _hann(window_len)[None, :]
    return np.abs(np.fft.rfft(frames, axis=1))


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=2)
def mel_filterbank(
    sample_rate: int = SAMPLE_RATE,
    window_len: int = WINDOW_LEN,
    n_mels: int = N_MELS,
) -> tuple[np.ndarray, np.ndarray]:
    """(bins x bands) triangular weights plus band center frequencies in Hz."""
    k = window_len // 2 + 1
    bin_freqs = np.arange(k) * sample_rate / window_len
    edges_hz = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2), n_mels + 2))
    lower, center, upper = edges_hz[:-2], edges_hz[1:-1], edges_hz[2:]
    rising = (bin_freqs[:, None] - lower[None, :]) / (center - lower)[None, :]
    falling = (upper[None, :] - bin_freqs[:, None]) / (upper - center)[None, :]
    weights = np.clip(np.minimum(rising, falling), 0.0, None)
    weights.setflags(write=False)
    center.setflags(write=False)
    return weights, center


def mel_spectrogram(x: np.ndarray) -> np.ndarray:
    """Linear-scale (T x 128) mel energies of a 44.1 kHz signal."""
    weights, _ = mel_filterbank()
    return stft_mag(x) @ weights


def to_log(mel_linear: np.ndarray) -> np.ndarray:
    return np.log(mel_linear + LOG_EPS)


def to_linear(mel_log: np.ndarray) -> np.ndarray:
    return np.clip(np.exp(mel_log) - LOG_EPS, 0.0, None)


def degrade(x: np.ndarray, cutoff_hz: float, sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Band-limit ``x`` to ``cutoff_hz`` by lowpass + down/up resampling.

    Chebyshev-I order 8 with 0.05 dB passband ripple at the cutoff, then a
    polyphase round trip through the implied low rate (2 * cutoff), length
    preserved. Mirrors the degradation the evaluation harness applies.
    """
    if not (0 < cutoff_hz < sample_rate / 2):
        raise ValueError(f"cutoff {cutoff_hz} Hz outside (0, Nyquist)")
    low_rate = max(2, int(round(2.0 * cutoff_hz)))
    b, a = signal.cheby1(8, 0.05, cutoff_hz / (sample_rate / 2))
    filtered = signal.lfilter(b, a, x)
    g = math.gcd(low_rate, sample_rate)
    down = signal.resample_poly(filtered, low_rate // g, sample_rate // g)
    up = signal.resample_poly(down, sample_rate // g, low_rate // g)
    n = x.shape[0]
    if up.shape[0] >= n:
        return up[:n]
    return np.pad(up, (0, n - up.shape[0]))


def detect_cutoff_band(mel_linear: np.ndarray, threshold_db: float = CUTOFF_THRESHOLD_DB) -> int:
    """Highest mel band whose time-averaged power sits within threshold of the peak."""
    if mel_linear.ndim != 2 or mel_linear.shape[0] < 1:
        raise ValueError(f"need a (T, F) mel matrix, got shape {mel_linear.shape}")
    if not np.any(mel_linear > 0):
        return mel_linear.shape[1] - 1
    level_db = 10.0 * np.log10((mel_linear**2).mean(axis=0) + _TINY)
    live = level_db > level_db.max() - threshold_db
    return int(np.nonzero(live)[0][-1])


def pad_bands(mel_linear: np.ndarray, cutoff_band: int) -> np.ndarray:
    """Replicate the cutoff band's energy into every band above it."""
    if not (0 <= cutoff_band < mel_linear.shape[1]):
        raise ValueError(f"cutoff band {cutoff_band} outside [0, {mel_linear.shape[1]})")
    out = mel_linear.copy()
    out[:, cutoff_band + 1 :] = mel_linear[:, cutoff_band : cutoff_band + 1]
    return out
