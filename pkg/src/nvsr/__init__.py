"""Speech super-resolution toolkit: band-limited audio up to 44.1 kHz.

The pipeline detects the input's bandwidth, extends its mel spectrogram
above the cutoff, synthesizes a waveform with a deterministic mel-inversion
vocoder, and replaces the synthesized low band with the original's.
"""
from .bench import EvalResult, GridSpec, RunOutcome, load_manifest, run_grid
from .degrade import DegradeSpec, cheby1_lowpass, resample_poly, simulate_lr
from .dsp import (
    HOP,
    N_MELS,
    SAMPLE_RATE,
    WINDOW_LEN,
    ComplexSpectrogram,
    MagSpectrogram,
    MelFilterbank,
    MelSpectrogram,
    Waveform,
    build_filterbank,
    default_filterbank,
    hz_to_mel,
    istft,
    mel_of_waveform,
    mel_pseudo_inverse,
    mel_to_hz,
    mel_to_linear,
    mel_to_log,
    mel_transform,
    stft,
)
from .melbwe import (
    CutoffMask,
    build_mask,
    detect_cutoff_band,
    external_predict,
    pad_predict,
)
from .melf import (
    ExchangeClient,
    ExchangeTimeoutError,
    MelfFormatError,
    ShapeMismatchError,
    read_melf,
    serve_once,
    write_melf,
)
from .metrics import lsd, lsd_waveforms
from .pipeline import PipelineConfig, lfr_postprocess, nvsr
from .vocoder import VocoderConfig, griffin_lim, peak_normalize, synthesize
from .wavio import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "HOP",
    "N_MELS",
    "SAMPLE_RATE",
    "WINDOW_LEN",
    "ComplexSpectrogram",
    "CutoffMask",
    "DegradeSpec",
    "EvalResult",
    "ExchangeClient",
    "ExchangeTimeoutError",
    "GridSpec",
    "MagSpectrogram",
    "MelFilterbank",
    "MelSpectrogram",
    "MelfFormatError",
    "PipelineConfig",
    "RunOutcome",
    "ShapeMismatchError",
    "VocoderConfig",
    "Waveform",
    "build_filterbank",
    "build_mask",
    "cheby1_lowpass",
    "default_filterbank",
    "detect_cutoff_band",
    "external_predict",
    "griffin_lim",
    "hz_to_mel",
    "istft",
    "lfr_postprocess",
    "load_manifest",
    "lsd",
    "lsd_waveforms",
    "mel_of_waveform",
    "mel_pseudo_inverse",
    "mel_to_hz",
    "mel_to_linear",
    "mel_to_log",
    "mel_transform",
    "nvsr",
    "pad_predict",
    "peak_normalize",
    "read_melf",
    "read_wav",
    "resample_poly",
    "run_grid",
    "serve_once",
    "simulate_lr",
    "stft",
    "synthesize",
    "write_melf",
    "write_wav",
]
