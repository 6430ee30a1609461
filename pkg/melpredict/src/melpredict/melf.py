"""Reader/writer for the MELF mel-spectrogram interchange format.

Layout (little-endian): 4-byte magic "MELF", u32 version (1), u32 n_frames,
u32 n_bands, u32 sample_rate, u32 window_len, u32 frame_hop, u8 scale code
(0 = linear energies, 1 = natural log of energy + 1e-8), then n_frames *
n_bands float32 values in frame-major order. Files are written atomically
(temp name in the same directory, then rename).
"""
from __future__ import annotations

import os
import struct
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

MAGIC = b"MELF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIIIB")

REQUEST_NAME = "request.melf"
RESPONSE_NAME = "response.melf"
ERROR_NAME = "response.error"

_SCALE_TO_CODE = {"linear": 0, "log": 1}
_CODE_TO_SCALE = {0: "linear", 1: "log"}


class MelfFormatError(ValueError):
    """Raised when bytes do not parse as a valid MELF file."""


@dataclass(frozen=True)
class MelPacket:
    """One mel spectrogram plus the framing metadata the format carries."""

    energies: np.ndarray  # (T, F) float64
    sample_rate: int
    window_len: int
    frame_hop: int
    scale: str = "linear"

    def __post_init__(self):
        if self.scale not in _SCALE_TO_CODE:
            raise ValueError(f"unknown scale {self.scale!r}")
        if getattr(self.energies, "ndim", None) != 2:
            raise ValueError("energies must be a 2-D (frames, bands) array")

    def with_energies(self, energies: np.ndarray, scale: str) -> "MelPacket":
        return replace(self, energies=energies, scale=scale)


def encode(packet: MelPacket) -> bytes:
    if packet.scale not in _SCALE_TO_CODE:
        raise ValueError(f"unknown scale {packet.scale!r}")
    t, f = packet.energies.shape
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        t,
        f,
        packet.sample_rate,
        packet.window_len,
        packet.frame_hop,
        _SCALE_TO_CODE[packet.scale],
    )
    return header + np.ascontiguousarray(packet.energies, dtype="<f4").tobytes()


def decode(blob: bytes) -> MelPacket:
    if len(blob) < _HEADER.size:
        raise MelfFormatError(f"blob of {len(blob)} bytes is shorter than the header")
    magic, version, t, f, rate, window_len, hop, scale_code = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise MelfFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise MelfFormatError(f"unsupported version {version}")
    if scale_code not in _CODE_TO_SCALE:
        raise MelfFormatError(f"unknown scale code {scale_code}")
    expected = _HEADER.size + t * f * 4
    if len(blob) != expected:
        raise MelfFormatError(
            f"expected {expected} bytes for {t}x{f} frames, got {len(blob)}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    return MelPacket(
        energies=data.astype(np.float64).reshape(t, f),
        sample_rate=rate,
        window_len=window_len,
        frame_hop=hop,
        scale=_CODE_TO_SCALE[scale_code],
    )


def write_melf(path: str | os.PathLike, packet: MelPacket) -> None:
    path = Path(path)
    tmp = path.with_name(f".{path.name}.{uuid.uuid4().hex}.tmp")
    tmp.write_bytes(encode(packet))
    os.replace(tmp, path)


def read_melf(path: str | os.PathLike) -> MelPacket:
    return decode(Path(path).read_bytes())


def write_error(exchange_dir: str | os.PathLike, message: str) -> None:
    d = Path(exchange_dir)
    tmp = d / f".{ERROR_NAME}.{uuid.uuid4().hex}.tmp"
    tmp.write_text(message, encoding="utf-8")
    os.replace(tmp, d / ERROR_NAME)
