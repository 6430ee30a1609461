"""WAV file reading and writing (mono, 16-bit integer or 32-bit float PCM)."""
from __future__ import annotations

import warnings

import numpy as np
from scipy.io import wavfile

from .dsp import Waveform


def read_wav(path) -> Waveform:
    """Read a WAV file as a mono float waveform in [-1, 1].

    Multi-channel input is downmixed by channel averaging (with a warning).
    16-bit integer samples are scaled by 1/32768; float samples pass through.
    """
    sample_rate, data = wavfile.read(path)
    if data.ndim == 2:
        warnings.warn(f"{path}: downmixing {data.shape[1]} channels by averaging")
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
    return Waveform(samples, int(sample_rate))


def write_wav(path, w: Waveform, fmt: str = "float32"):
    """Write a waveform as 32-bit float (default) or 16-bit integer PCM."""
    if fmt == "float32":
        wavfile.write(path, w.sample_rate, w.samples.astype(np.float32))
    elif fmt == "int16":
        clipped = np.clip(w.samples, -1.0, 32767.0 / 32768.0)
        wavfile.write(path, w.sample_rate, np.round(clipped * 32768.0).astype(np.int16))
    else:
        raise ValueError(f"unsupported WAV format {fmt!r} (use 'float32' or 'int16')")
