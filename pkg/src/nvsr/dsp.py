"""Time-frequency primitives: STFT/iSTFT, mel scale, mel filterbank, mel inversion.

All functions are pure and operate on immutable value types holding numpy
arrays. The canonical analysis configuration used throughout the toolkit is a
2048-sample Hann window with a 441-sample hop at 44.1 kHz, with 128 mel bands
spanning the full Nyquist range.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

# Canonical analysis configuration at 44.1 kHz.
SAMPLE_RATE = 44100
WINDOW_LEN = 2048
HOP = 441
N_MELS = 128

# Floor added inside log-scale mel conversion.
LOG_EPS = 1e-8

# Accumulated squared-window values below this are treated as zero during
# overlap-add normalization.
_WSS_TINY = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Waveform:
    """Mono sample sequence with its sampling rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"waveform must be 1-D, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform contains non-finite samples")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", _freeze(samples))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class ComplexSpectrogram:
    """T x K complex STFT matrix plus the framing metadata that produced it."""

    bins: np.ndarray
    window_len: int
    frame_hop: int
    sample_rate: int

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.complex128)
        if bins.ndim != 2:
            raise ValueError(f"spectrogram must be 2-D, got shape {bins.shape}")
        if bins.shape[1] != self.window_len // 2 + 1:
            raise ValueError(
                f"bin count {bins.shape[1]} inconsistent with window_len {self.window_len}"
            )
        if not np.all(np.isfinite(bins)):
            raise ValueError("spectrogram contains non-finite values")
        object.__setattr__(self, "bins", _freeze(bins))

    @property
    def n_frames(self) -> int:
        return self.bins.shape[0]

    @property
    def n_bins(self) -> int:
        return self.bins.shape[1]

    def magnitude(self) -> "MagSpectrogram":
        return MagSpectrogram(
            mags=np.abs(self.bins),
            window_len=self.window_len,
            frame_hop=self.frame_hop,
            sample_rate=self.sample_rate,
        )


@dataclass(frozen=True)
class MagSpectrogram:
    """T x K non-negative magnitude matrix with framing metadata."""

    mags: np.ndarray
    window_len: int
    frame_hop: int
    sample_rate: int

    def __post_init__(self):
        mags = np.asarray(self.mags, dtype=np.float64)
        if mags.ndim != 2:
            raise ValueError(f"magnitudes must be 2-D, got shape {mags.shape}")
        if not np.all(np.isfinite(mags)):
            raise ValueError("magnitudes contain non-finite values")
        if mags.size and mags.min() < 0:
            raise ValueError("magnitudes must be non-negative")
        object.__setattr__(self, "mags", _freeze(mags))

    @property
    def n_frames(self) -> int:
        return self.mags.shape[0]

    @property
    def n_bins(self) -> int:
        return self.mags.shape[1]


@dataclass(frozen=True)
class MelFilterbank:
    """K x F triangular filter matrix mapping linear bins to mel bands."""

    weights: np.ndarray
    sample_rate: int
    window_len: int
    f_min: float
    f_max: float
    band_centers_hz: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        centers = np.asarray(self.band_centers_hz, dtype=np.float64)
        if weights.min() < 0:
            raise ValueError("filterbank weights must be non-negative")
        if np.any(weights.sum(axis=0) == 0):
            raise ValueError("filterbank has an empty mel band")
        if np.any(np.diff(centers) <= 0):
            raise ValueError("band center frequencies must be strictly increasing")
        object.__setattr__(self, "weights", _freeze(weights))
        object.__setattr__(self, "band_centers_hz", _freeze(centers))

    @property
    def n_bins(self) -> int:
        return self.weights.shape[0]

    @property
    def n_mels(self) -> int:
        return self.weights.shape[1]

    def band_of(self, freq_hz: float) -> int:
        """Index of the mel band whose center frequency is nearest freq_hz."""
        return int(np.argmin(np.abs(self.band_centers_hz - freq_hz)))

    def band_at_or_below(self, freq_hz: float) -> int:
        """Highest band whose center frequency does not exceed freq_hz."""
        below = np.nonzero(self.band_centers_hz <= freq_hz)[0]
        return int(below[-1]) if below.size else 0


@dataclass(frozen=True)
class MelSpectrogram:
    """T x F mel-band matrix; ``scale`` records linear vs natural-log values."""

    energies: np.ndarray
    window_len: int
    frame_hop: int
    sample_rate: int
    scale: str = "linear"

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=np.float64)
        if energies.ndim != 2:
            raise ValueError(f"mel energies must be 2-D, got shape {energies.shape}")
        if not np.all(np.isfinite(energies)):
            raise ValueError("mel energies contain non-finite values")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"unknown scale {self.scale!r}")
        if self.scale == "linear" and energies.size and energies.min() < 0:
            raise ValueError("linear-scale mel energies must be non-negative")
        object.__setattr__(self, "energies", _freeze(energies))

    @property
    def n_frames(self) -> int:
        return self.energies.shape[0]

    @property
    def n_mels(self) -> int:
        return self.energies.shape[1]


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window (the DFT-symmetric variant used for analysis)."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def _check_framing(window_len: int, hop: int):
    if window_len <= 0 or window_len & (window_len - 1):
        raise ValueError(f"window_len must be a power of two, got {window_len}")
    if hop <= 0 or hop > window_len:
        raise ValueError(f"hop must satisfy 0 < hop <= window_len, got {hop}")


def stft(w: Waveform, window_len: int = WINDOW_LEN, hop: int = HOP) -> ComplexSpectrogram:
    """Short-time Fourier transform with center-padded Hann frames.

    Produces ceil(len / hop) frames of window_len/2 + 1 bins. Frame t is the
    windowed DFT of the signal centered on sample t*hop.
    """
    _check_framing(window_len, hop)
    x = w.samples
    n = x.shape[0]
    n_frames = -(-n // hop)  # ceil
    k = window_len // 2 + 1
    if n_frames == 0:
        return ComplexSpectrogram(
            bins=np.zeros((0, k), dtype=np.complex128),
            window_len=window_len,
            frame_hop=hop,
            sample_rate=w.sample_rate,
        )
    pad = window_len // 2
    total = (n_frames - 1) * hop + window_len
    padded = np.zeros(total, dtype=np.float64)
    padded[pad : pad + n] = x
    idx = np.arange(window_len)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = padded[idx] * hann_window(window_len)[None, :]
    return ComplexSpectrogram(
        bins=np.fft.rfft(frames, axis=1),
        window_len=window_len,
        frame_hop=hop,
        sample_rate=w.sample_rate,
    )


def istft(s: ComplexSpectrogram) -> Waveform:
    """Inverse STFT via weighted overlap-add.

    Requires hop <= window_len / 2 so the squared analysis window covers
    every sample; returns exactly n_frames * hop samples. Reconstruction of
    stft(w) matches w to floating-point accuracy on interior samples.
    """
    window_len, hop = s.window_len, s.frame_hop
    if hop > window_len // 2:
        raise ValueError(
            f"overlap-add needs hop <= window_len/2, got hop={hop}, window_len={window_len}"
        )
    n_frames = s.n_frames
    if n_frames == 0:
        return Waveform(np.zeros(0), s.sample_rate)
    window = hann_window(window_len)
    frames = np.fft.irfft(s.bins, n=window_len, axis=1) * window[None, :]
    total = (n_frames - 1) * hop + window_len
    out = np.zeros(total, dtype=np.float64)
    wss = np.zeros(total, dtype=np.float64)
    wsq = window * window
    for t in range(n_frames):
        start = t * hop
        out[start : start + window_len] += frames[t]
        wss[start : start + window_len] += wsq
    good = wss > _WSS_TINY
    out[good] /= wss[good]
    pad = window_len // 2
    return Waveform(out[pad : pad + n_frames * hop], s.sample_rate)


def hz_to_mel(freq_hz):
    """Map Hz to mel: m = 2595 * log10(1 + f / 700). Rejects negative input."""
    f = np.asarray(freq_hz, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be non-negative")
    m = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(m) if np.isscalar(freq_hz) else m


def mel_to_hz(mel):
    """Inverse of hz_to_mel."""
    m = np.asarray(mel, dtype=np.float64)
    f = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(f) if np.isscalar(mel) else f


def build_filterbank(
    sample_rate: int = SAMPLE_RATE,
    window_len: int = WINDOW_LEN,
    n_mels: int = N_MELS,
    f_min: float = 0.0,
    f_max: float | None = None,
    area_normalize: bool = False,
) -> MelFilterbank:
    """Triangular mel filterbank with peak-1 filters (optionally area-normalized).

    Band centers are equally spaced on the mel axis between hz_to_mel(f_min)
    and hz_to_mel(f_max). Raises if n_mels cannot be supported by the number
    of available frequency bins.
    """
    if f_max is None:
        f_max = sample_rate / 2
    if not (0 <= f_min < f_max <= sample_rate / 2):
        raise ValueError(f"need 0 <= f_min < f_max <= Nyquist, got [{f_min}, {f_max}]")
    if n_mels < 2:
        raise ValueError("n_mels must be at least 2")
    k = window_len // 2 + 1
    bin_freqs = np.arange(k) * sample_rate / window_len
    edges_mel = np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2)
    edges_hz = mel_to_hz(edges_mel)
    lower, center, upper = edges_hz[:-2], edges_hz[1:-1], edges_hz[2:]
    rising = (bin_freqs[:, None] - lower[None, :]) / (center - lower)[None, :]
    falling = (upper[None, :] - bin_freqs[:, None]) / (upper - center)[None, :]
    weights = np.clip(np.minimum(rising, falling), 0.0, None)
    if np.any(weights.sum(axis=0) == 0):
        raise ValueError(
            f"n_mels={n_mels} too large for {k} bins: some bands cover no bin"
        )
    if area_normalize:
        weights = weights * (2.0 / (upper - lower))[None, :]
    return MelFilterbank(
        weights=weights,
        sample_rate=sample_rate,
        window_len=window_len,
        f_min=float(f_min),
        f_max=float(f_max),
        band_centers_hz=center.copy(),
    )


@functools.lru_cache(maxsize=1)
def default_filterbank() -> MelFilterbank:
    """The shared 1025-bin, 128-band filterbank of the reference configuration."""
    return build_filterbank()


def mel_transform(s: MagSpectrogram, fb: MelFilterbank) -> MelSpectrogram:
    """Project a magnitude spectrogram through the filterbank (linear scale)."""
    if s.n_bins != fb.n_bins:
        raise ValueError(f"bin count mismatch: spectrogram {s.n_bins}, filterbank {fb.n_bins}")
    return MelSpectrogram(
        energies=s.mags @ fb.weights,
        window_len=s.window_len,
        frame_hop=s.frame_hop,
        sample_rate=s.sample_rate,
        scale="linear",
    )


def mel_pseudo_inverse(
    m: MelSpectrogram,
    fb: MelFilterbank,
    max_iter: int = 200,
    tol: float = 1e-8,
) -> MagSpectrogram:
    """Non-negative least-squares estimate of a magnitude spectrogram from mel.

    Starts from the normalized-transpose projection and refines it with
    multiplicative updates so that mel_transform(result) approximates the
    input in the least-squares sense. Output is always non-negative.
    """
    if m.scale != "linear":
        raise ValueError("mel_pseudo_inverse expects a linear-scale mel spectrogram")
    if m.n_mels != fb.n_mels:
        raise ValueError(f"band count mismatch: mel {m.n_mels}, filterbank {fb.n_mels}")
    target = m.energies
    if not target.size or target.max() <= 0:
        return MagSpectrogram(
            mags=np.zeros((m.n_frames, fb.n_bins)),
            window_len=m.window_len,
            frame_hop=m.frame_hop,
            sample_rate=m.sample_rate,
        )
    weights = fb.weights  # (K, F)
    band_mass = weights.sum(axis=0)  # (F,)
    x = (target / band_mass) @ weights.T  # normalized-transpose initialization
    numer = target @ weights.T
    for _ in range(max_iter):
        denom = (x @ weights) @ weights.T
        x_new = x * numer / (denom + 1e-12)
        step = np.linalg.norm(x_new - x) / (np.linalg.norm(x) + 1e-30)
        x = x_new
        if step < tol:
            break
    return MagSpectrogram(
        mags=np.clip(x, 0.0, None),
        window_len=m.window_len,
        frame_hop=m.frame_hop,
        sample_rate=m.sample_rate,
    )


def mel_to_log(m: MelSpectrogram) -> MelSpectrogram:
    """Natural-log mel values: log(energy + 1e-8)."""
    if m.scale == "log":
        return m
    return MelSpectrogram(
        energies=np.log(m.energies + LOG_EPS),
        window_len=m.window_len,
        frame_hop=m.frame_hop,
        sample_rate=m.sample_rate,
        scale="log",
    )


def mel_to_linear(m: MelSpectrogram) -> MelSpectrogram:
    """Inverse of mel_to_log, clipped to non-negative energies."""
    if m.scale == "linear":
        return m
    return MelSpectrogram(
        energies=np.clip(np.exp(m.energies) - LOG_EPS, 0.0, None),
        window_len=m.window_len,
        frame_hop=m.frame_hop,
        sample_rate=m.sample_rate,
        scale="linear",
    )


def mel_of_waveform(
    w: Waveform,
    fb: MelFilterbank,
    window_len: int = WINDOW_LEN,
    hop: int = HOP,
) -> MelSpectrogram:
    """Convenience: linear-scale mel spectrogram straight from a waveform."""
    return mel_transform(stft(w, window_len, hop).magnitude(), fb)
