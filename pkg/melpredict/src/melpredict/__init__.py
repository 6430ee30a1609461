"""ResUNet mel-band bandwidth-extension predictor.

Trains a residual U-Net to restore the upper mel bands of band-limited
speech and serves predictions over a shared-directory MELF exchange so any
MELF-speaking synthesis pipeline can use it as its external predictor.
"""
from .audio import (
    HOP,
    LOG_EPS,
    N_MELS,
    SAMPLE_RATE,
    WINDOW_LEN,
    degrade,
    detect_cutoff_band,
    mel_filterbank,
    mel_spectrogram,
    pad_bands,
    read_wav,
    to_linear,
    to_log,
)
from .data import CropDataset, collect_wavs
from .melf import MelfFormatError, MelPacket, decode, encode, read_melf, write_melf
from .model import (
    ResUNet,
    ResUNetSpec,
    load_checkpoint,
    mae_loss,
    predict_log_mel,
    save_checkpoint,
)
from .serve import respond, serve
from .train import TrainConfig, TrainResult, learning_rate, train

__version__ = "0.1.0"

__all__ = [
    "HOP",
    "LOG_EPS",
    "N_MELS",
    "SAMPLE_RATE",
    "WINDOW_LEN",
    "CropDataset",
    "MelPacket",
    "MelfFormatError",
    "ResUNet",
    "ResUNetSpec",
    "TrainConfig",
    "TrainResult",
    "collect_wavs",
    "decode",
    "degrade",
    "detect_cutoff_band",
    "encode",
    "learning_rate",
    "load_checkpoint",
    "mae_loss",
    "mel_filterbank",
    "mel_spectrogram",
    "pad_bands",
    "predict_log_mel",
    "read_melf",
    "read_wav",
    "respond",
    "save_checkpoint",
    "serve",
    "to_linear",
    "to_log",
    "train",
    "write_melf",
]
