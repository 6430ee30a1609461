"""MELF mel-spectrogram interchange format and directory exchange protocol.

A MELF file is a little-endian binary blob:

    offset  size  field
    0       4     magic "MELF"
    4       4     u32 version (currently 1)
    8       4     u32 n_frames (T)
    12      4     u32 n_bands (F)
    16      4     u32 sample_rate
    20      4     u32 window_len
    24      4     u32 frame_hop
    28      1     u8 scale: 0 = linear energies, 1 = natural log of
                  (energy + 1e-8)
    29      T*F*4 f32 row-major frame-major data

The exchange protocol runs over a shared directory: the requester atomically
writes ``request.melf``, the responder consumes it and atomically writes
``response.melf`` (or ``response.error`` with a UTF-8 message), and the
requester deletes the response once read. Atomicity comes from writing to a
temp name in the same directory and renaming into place.
"""
from __future__ import annotations

import os
import struct
import time
import uuid
from pathlib import Path

import numpy as np

from .dsp import MelSpectrogram

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


class ExchangeTimeoutError(TimeoutError):
    """Raised when the exchange counterpart does not respond in time."""


class ShapeMismatchError(ValueError):
    """Raised when a response's geometry disagrees with the request."""


def encode(mel: MelSpectrogram) -> bytes:
    t, f = mel.energies.shape
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        t,
        f,
        mel.sample_rate,
        mel.window_len,
        mel.frame_hop,
        _SCALE_TO_CODE[mel.scale],
    )
    return header + np.ascontiguousarray(mel.energies, dtype="<f4").tobytes()


def decode(blob: bytes) -> MelSpectrogram:
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
    energies = data.astype(np.float64).reshape(t, f)
    return MelSpectrogram(
        energies,
        sample_rate=rate,
        window_len=window_len,
        frame_hop=hop,
        scale=_CODE_TO_SCALE[scale_code],
    )


def write_melf(path: str | os.PathLike, mel: MelSpectrogram) -> None:
    """Atomically write ``mel`` to ``path`` (temp file + rename)."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.{uuid.uuid4().hex}.tmp")
    tmp.write_bytes(encode(mel))
    os.replace(tmp, path)


def read_melf(path: str | os.PathLike) -> MelSpectrogram:
    return decode(Path(path).read_bytes())


class ExchangeClient:
    """Requester side of the directory exchange.

    Not reentrant: one outstanding request per directory at a time.
    """

    def __init__(
        self,
        exchange_dir: str | os.PathLike,
        timeout_s: float = 60.0,
        poll_interval_s: float = 0.05,
    ):
        self.exchange_dir = Path(exchange_dir)
        self.timeout_s = timeout_s
        self.poll_interval_s = poll_interval_s

    def request(self, mel: MelSpectrogram) -> MelSpectrogram:
        d = self.exchange_dir
        d.mkdir(parents=True, exist_ok=True)
        response = d / RESPONSE_NAME
        error = d / ERROR_NAME
        for stale in (response, error):
            stale.unlink(missing_ok=True)
        write_melf(d / REQUEST_NAME, mel)
        deadline = time.monotonic() + self.timeout_s
        while True:
            if error.exists():
                message = error.read_text(encoding="utf-8", errors="replace")
                error.unlink(missing_ok=True)
                raise RuntimeError(f"exchange responder failed: {message.strip()}")
            if response.exists():
                try:
                    out = read_melf(response)
                finally:
                    response.unlink(missing_ok=True)
                if out.energies.shape != mel.energies.shape:
                    raise ShapeMismatchError(
                        f"response shape {out.energies.shape} != request "
                        f"shape {mel.energies.shape}"
                    )
                theirs = (out.sample_rate, out.window_len, out.frame_hop)
                ours = (mel.sample_rate, mel.window_len, mel.frame_hop)
                if theirs != ours:
                    raise ShapeMismatchError(
                        f"response framing {theirs} != request framing {ours}"
                    )
                return out
            if time.monotonic() >= deadline:
                (d / REQUEST_NAME).unlink(missing_ok=True)
                raise ExchangeTimeoutError(
                    f"no response in {d} after {self.timeout_s} s"
                )
            time.sleep(self.poll_interval_s)


def serve_once(
    exchange_dir: str | os.PathLike,
    handler,
    timeout_s: float | None = None,
    poll_interval_s: float = 0.05,
) -> bool:
    """Responder side: wait for one request, answer it, return True.

    ``handler`` maps MelSpectrogram -> MelSpectrogram. Handler exceptions are
    reported to the requester through the error sidecar and re-raised. With a
    timeout, returns False if no request arrives.
    """
    d = Path(exchange_dir)
    d.mkdir(parents=True, exist_ok=True)
    request = d / REQUEST_NAME
    deadline = None if timeout_s is None else time.monotonic() + timeout_s
    while not request.exists():
        if deadline is not None and time.monotonic() >= deadline:
            return False
        time.sleep(poll_interval_s)
    try:
        mel = read_melf(request)
    finally:
        request.unlink(missing_ok=True)
    try:
        out = handler(mel)
    except Exception as exc:
        tmp = d / f".{ERROR_NAME}.{uuid.uuid4().hex}.tmp"
        tmp.write_text(f"{type(exc).__name__}: {exc}", encoding="utf-8")
        os.replace(tmp, d / ERROR_NAME)
        raise
    write_melf(d / RESPONSE_NAME, out)
    return True
