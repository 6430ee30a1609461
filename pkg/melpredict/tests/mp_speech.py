"""Synthetic voiced-speech test signals shared by the melpredict tests."""
import numpy as np
from scipy import signal
from scipy.io import wavfile

RATE = 44100


def speech_wave(duration: float, seed: int) -> np.ndarray:
    """Synthetic voiced utterance: pulse train + tilt + resonances + envelope."""
    rng = np.random.default_rng(seed)
    n = int(round(duration * RATE))
    f0 = rng.uniform(90.0, 220.0)
    excitation = np.zeros(n)
    pos = 0.0
    while pos < n:
        excitation[int(pos)] = 1.0
        pos += RATE / (f0 * (1.0 + 0.1 * np.sin(2 * np.pi * 3.0 * pos / RATE)))
    excitation += 0.02 * rng.standard_normal(n)
    x = signal.lfilter([1.0], [1.0, -0.93], excitation)
    for _ in range(3):
        fc = rng.uniform(300.0, 3500.0)
        bw = rng.uniform(80.0, 300.0)
        r = np.exp(-np.pi * bw / RATE)
        theta = 2 * np.pi * fc / RATE
        x = signal.lfilter([1.0], [1.0, -2 * r * np.cos(theta), r * r], x)
    env = 0.55 + 0.45 * np.sin(2 * np.pi * rng.uniform(1.5, 4.0) * np.arange(n) / RATE)
    x = x * env
    return 0.3 * x / np.max(np.abs(x))


def write_speech_wav(path, duration: float, seed: int) -> None:
    wavfile.write(path, RATE, speech_wave(duration, seed).astype(np.float32))
