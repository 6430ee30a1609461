"""Low-resolution simulation: Chebyshev-I lowpass, polyphase resampling.

The simulated input to the super-resolution pipeline is produced by
lowpass-filtering a 44.1 kHz reference at half the target rate, decimating to
the target rate with a polyphase resampler, and upsampling back to the source
rate with the same resampler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .dsp import Waveform

# Polyphase anti-aliasing prototype: Kaiser-windowed sinc, ~54 dB stopband.
# 32 taps per phase keeps the upsampler's transition band inside a couple of
# mel bands of the cutoff, so the band-limiting edge stays localized; the
# common 10-taps-per-phase design smears it several bands upward.
FIR_TAPS_PER_PHASE = 32
FIR_KAISER_BETA = 5.0

_MAX_RATIO = 1000


@dataclass(frozen=True)
class DegradeSpec:
    """Parameters of the lowpass + resample degradation."""

    target_rate: int
    source_rate: int
    filter_order: int = 8
    passband_ripple_db: float = 0.05
    zero_phase: bool = False

    def __post_init__(self):
        if not (0 < self.target_rate < self.source_rate):
            raise ValueError(
                f"need 0 < target_rate < source_rate, got {self.target_rate}/{self.source_rate}"
            )
        if self.filter_order < 1:
            raise ValueError("filter_order must be >= 1")
        if self.passband_ripple_db <= 0:
            raise ValueError("passband_ripple_db must be positive")


def cheby1_lowpass(
    w: Waveform,
    cutoff_hz: float,
    order: int = 8,
    ripple_db: float = 0.05,
    zero_phase: bool = False,
) -> Waveform:
    """Chebyshev type I lowpass filter applied forward-only by default.

    ``zero_phase`` switches to forward-backward filtering (no group delay,
    squared magnitude response).
    """
    nyquist = w.sample_rate / 2
    if not (0 < cutoff_hz < nyquist):
        raise ValueError(f"cutoff {cutoff_hz} Hz outside (0, {nyquist}) Hz")
    b, a = signal.cheby1(order, ripple_db, cutoff_hz / nyquist, btype="low")
    if zero_phase:
        out = signal.filtfilt(b, a, w.samples)
    else:
        out = signal.lfilter(b, a, w.samples)
    return Waveform(out, w.sample_rate)


def _reduced_ratio(target_rate: int, source_rate: int) -> tuple[int, int]:
    g = math.gcd(int(target_rate), int(source_rate))
    up, down = int(target_rate) // g, int(source_rate) // g
    if max(up, down) > _MAX_RATIO:
        raise ValueError(
            f"resampling ratio {target_rate}/{source_rate} reduces to {up}/{down}; "
            f"numerator and denominator must stay <= {_MAX_RATIO}"
        )
    return up, down


def _polyphase_fir(up: int, down: int) -> np.ndarray:
    max_rate = max(up, down)
    half_len = FIR_TAPS_PER_PHASE * max_rate
    return signal.firwin(
        2 * half_len + 1, 1.0 / max_rate, window=("kaiser", FIR_KAISER_BETA)
    )


def resample_poly(w: Waveform, target_rate: int) -> Waveform:
    """Rational-ratio polyphase resampling.

    Output length is round(len * target_rate / source_rate). Ratios must
    reduce to numerator and denominator of at most 1000.
    """
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    up, down = _reduced_ratio(target_rate, w.sample_rate)
    if up == down:
        return Waveform(w.samples.copy(), int(target_rate))
    n_out = round(len(w) * up / down)
    out = signal.resample_poly(w.samples, up, down, window=_polyphase_fir(up, down))
    if out.shape[0] > n_out:
        out = out[:n_out]
    elif out.shape[0] < n_out:
        out = np.pad(out, (0, n_out - out.shape[0]))
    return Waveform(out, int(target_rate))


def simulate_lr(y_h: Waveform, spec: DegradeSpec) -> tuple[Waveform, Waveform]:
    """Simulate a low-resolution recording of ``y_h``.

    Returns ``(x_l, x_h)``: the signal decimated to the target rate, and its
    upsampled-back version at the source rate with exactly len(y_h) samples.
    """
    if y_h.sample_rate != spec.source_rate:
        raise ValueError(
            f"waveform rate {y_h.sample_rate} != spec source_rate {spec.source_rate}"
        )
    filtered = cheby1_lowpass(
        y_h,
        spec.target_rate / 2,
        order=spec.filter_order,
        ripple_db=spec.passband_ripple_db,
        zero_phase=spec.zero_phase,
    )
    x_l = resample_poly(filtered, spec.target_rate)
    x_h = resample_poly(x_l, spec.source_rate)
    n = len(y_h)
    samples = x_h.samples
    if samples.shape[0] > n:
        samples = samples[:n]
    elif samples.shape[0] < n:
        samples = np.pad(samples, (0, n - samples.shape[0]))
    return x_l, Waveform(samples, spec.source_rate)
