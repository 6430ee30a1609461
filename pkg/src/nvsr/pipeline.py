"""End-to-end super-resolution pipeline and low-band replacement.

The pipeline upsamples the input to 44.1 kHz, extends its mel spectrogram
above the detected (or given) cutoff, synthesizes a waveform, and finally
swaps the synthesized low band for the original's, since everything below
the cutoff was already correct in the input.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .degrade import resample_poly
from .dsp import MelSpectrogram, Waveform, default_filterbank, mel_of_waveform
from .melbwe import build_mask, detect_cutoff_band, external_predict, pad_predict
from .vocoder import VocoderConfig, synthesize

EXCHANGE_DIR_ENV = "NVSR_EXCHANGE_DIR"
MAX_DURATION_S = 600.0
MIN_INPUT_RATE = 2000

PREDICTORS = ("pad", "external", "none")

LFR_TRANSITION_HZ = 250.0
_LFR_STOPBAND_DB = 140.0
_LFR_MAX_TAPS = 30001


@dataclass(frozen=True)
class PipelineConfig:
    """Pipeline settings; predictor "none" passes the input mel through."""

    predictor: str = "pad"
    vocoder: VocoderConfig = field(default_factory=VocoderConfig)
    postproc: bool = True
    cutoff_hz: float | None = None
    exchange_dir: str | None = None
    exchange_timeout_s: float = 60.0
    lfr_transition_hz: float = LFR_TRANSITION_HZ
    max_duration_s: float = MAX_DURATION_S

    def __post_init__(self):
        if self.predictor not in PREDICTORS:
            raise ValueError(f"predictor must be one of {PREDICTORS}, got {self.predictor!r}")
        if self.cutoff_hz is not None and not (
            0 < self.cutoff_hz <= self.vocoder.output_rate / 2
        ):
            raise ValueError(f"cutoff_hz {self.cutoff_hz} outside (0, Nyquist]")
        if self.exchange_timeout_s <= 0:
            raise ValueError("exchange_timeout_s must be positive")
        if self.lfr_transition_hz <= 0:
            raise ValueError("lfr_transition_hz must be positive")
        if self.max_duration_s <= 0:
            raise ValueError("max_duration_s must be positive")


def fit_length(w: Waveform, n: int) -> Waveform:
    """Trim or zero-pad to exactly n samples."""
    if n < 0:
        raise ValueError("target length must be >= 0")
    samples = w.samples
    if samples.shape[0] > n:
        samples = samples[:n]
    elif samples.shape[0] < n:
        samples = np.pad(samples, (0, n - samples.shape[0]))
    else:
        return w
    return Waveform(samples, w.sample_rate)


def lfr_postprocess(
    vocoder_out: Waveform,
    original: Waveform,
    cutoff_hz: float,
    transition_hz: float = LFR_TRANSITION_HZ,
) -> Waveform:
    """Replace the synthesized low band with the original's, below cutoff_hz.

    out = vocoder_out + LP(original - vocoder_out) with a linear-phase FIR
    lowpass whose stopband starts at the cutoff, so spectral content below
    cutoff - transition comes from the original to within the filter's
    140 dB ripple, and content at or above the cutoff stays the vocoder's.
    The complementary time-domain crossover avoids resynthesizing a masked
    spectrogram, which would bleed the high-band difference across the whole
    low band. The shorter input is zero-padded to the longer.
    """
    if vocoder_out.sample_rate != original.sample_rate:
        raise ValueError(
            f"rate mismatch: vocoder {vocoder_out.sample_rate}, "
            f"original {original.sample_rate}"
        )
    if transition_hz <= 0:
        raise ValueError("transition_hz must be positive")
    sr = original.sample_rate
    nyquist = sr / 2
    if not (0 < cutoff_hz <= nyquist):
        raise ValueError(f"cutoff {cutoff_hz} Hz outside (0, {nyquist}]")
    n = max(len(vocoder_out), len(original))
    voc = fit_length(vocoder_out, n)
    orig = fit_length(original, n)
    if cutoff_hz >= nyquist:
        return orig
    width = min(transition_hz, 0.5 * cutoff_hz)
    numtaps, beta = signal.kaiserord(_LFR_STOPBAND_DB, width / nyquist)
    numtaps = min(numtaps | 1, _LFR_MAX_TAPS)
    h = signal.firwin(
        numtaps, cutoff_hz - width / 2, window=("kaiser", beta), fs=sr
    )
    d = signal.fftconvolve(orig.samples - voc.samples, h)
    delay = (numtaps - 1) // 2
    low = d[delay : delay + n]
    return Waveform(voc.samples + low, sr)


def _resolve_exchange_dir(cfg: PipelineConfig) -> str:
    d = cfg.exchange_dir or os.environ.get(EXCHANGE_DIR_ENV)
    if not d:
        raise ValueError(
            f"external predictor needs an exchange directory (flag or ${EXCHANGE_DIR_ENV})"
        )
    return d


def predict_mel(mel: MelSpectrogram, cutoff_band: int, cfg: PipelineConfig) -> MelSpectrogram:
    """Run the configured predictor over a linear-scale mel spectrogram."""
    if cfg.predictor == "pad":
        mask = build_mask(cutoff_band, mel.n_frames, mel.n_mels)
        return pad_predict(mel, mask)
    if cfg.predictor == "external":
        return external_predict(
            mel, _resolve_exchange_dir(cfg), timeout_s=cfg.exchange_timeout_s
        )
    return mel


def nvsr(x: Waveform, cfg: PipelineConfig = PipelineConfig()) -> Waveform:
    """Super-resolve a band-limited waveform to 44.1 kHz.

    The input may arrive at any rate from 2 kHz up to the output rate; it is
    polyphase-resampled up first. Output duration matches the input within
    one hop. Empty input produces empty output.
    """
    out_rate = cfg.vocoder.output_rate
    if len(x) == 0:
        return Waveform(np.zeros(0), out_rate)
    if x.duration > cfg.max_duration_s:
        raise ValueError(
            f"input of {x.duration:.1f} s exceeds the {cfg.max_duration_s:.0f} s cap"
        )
    if not (MIN_INPUT_RATE <= x.sample_rate <= out_rate):
        raise ValueError(
            f"input rate {x.sample_rate} outside [{MIN_INPUT_RATE}, {out_rate}] Hz"
        )
    x_h = x if x.sample_rate == out_rate else resample_poly(x, out_rate)
    fb = default_filterbank()
    mel = mel_of_waveform(x_h, fb)
    if cfg.cutoff_hz is not None:
        cutoff_hz = float(cfg.cutoff_hz)
        cutoff_band = fb.band_at_or_below(cutoff_hz)
    else:
        cutoff_band = detect_cutoff_band(mel)
        cutoff_hz = float(fb.band_centers_hz[cutoff_band])
    mel_pred = predict_mel(mel, cutoff_band, cfg)
    w = synthesize(mel_pred, fb, cfg.vocoder)
    w = fit_length(w, len(x_h))
    if cfg.postproc:
        w = lfr_postprocess(w, x_h, cutoff_hz, transition_hz=cfg.lfr_transition_hz)
    return w
