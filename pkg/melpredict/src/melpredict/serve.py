"""Exchange-directory responder: answers MELF requests with predictions."""
from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from .audio import detect_cutoff_band, pad_bands, to_linear, to_log
from .melf import (
    REQUEST_NAME,
    RESPONSE_NAME,
    MelPacket,
    decode,
    write_error,
    write_melf,
)
from .model import ResUNet, load_checkpoint, predict_log_mel


def respond(model: ResUNet, meta: dict, request: MelPacket) -> MelPacket:
    """One request through the predictor; the reply keeps the request's scale."""
    if request.energies.shape[1] != model.spec.in_bands:
        raise ValueError(
            f"request has {request.energies.shape[1]} bands, "
            f"model expects {model.spec.in_bands}"
        )
    if request.energies.shape[0] < 1:
        raise ValueError("request has no frames")
    x_linear = to_linear(request.energies) if request.scale == "log" else request.energies
    if meta.get("pad_input", True):
        x_linear = pad_bands(x_linear, detect_cutoff_band(x_linear))
    x_log = to_log(x_linear)
    y_log = predict_log_mel(model, x_log)
    if request.scale == "log":
        return request.with_energies(y_log, "log")
    # The network runs in float32, so an identity model returns the input
    # quantized to float32. When that happens, reply with the original linear
    # energies so the response payload is bit-exact with the request.
    quantized = x_log.astype(np.float32).astype(np.float64)
    out = x_linear if np.array_equal(y_log, quantized) else to_linear(y_log)
    return request.with_energies(out, "linear")


def serve(
    exchange_dir,
    checkpoint_path,
    poll_interval_s: float = 0.05,
    idle_timeout_s: float | None = None,
    max_requests: int | None = None,
    log=None,
) -> int:
    """Answer requests until idle timeout or request budget; returns count.

    A request that fails to decode or evaluate produces a ``response.error``
    sidecar and serving continues with the next request.
    """
    d = Path(exchange_dir)
    d.mkdir(parents=True, exist_ok=True)
    model, meta = load_checkpoint(checkpoint_path)
    if log:
        log(f"serving {checkpoint_path} on {d}")
    request_path = d / REQUEST_NAME
    served = 0
    last_activity = time.monotonic()
    while True:
        if not request_path.exists():
            if (
                idle_timeout_s is not None
                and time.monotonic() - last_activity > idle_timeout_s
            ):
                return served
            time.sleep(poll_interval_s)
            continue
        try:
            blob = request_path.read_bytes()
        finally:
            request_path.unlink(missing_ok=True)
        try:
            out = respond(model, meta, decode(blob))
        except Exception as exc:
            write_error(d, f"{type(exc).__name__}: {exc}")
            if log:
                log(f"request failed: {exc}")
        else:
            write_melf(d / RESPONSE_NAME, out)
            served += 1
            if log:
                log(f"served request #{served} ({out.energies.shape[0]} frames)")
        last_activity = time.monotonic()
        if max_requests is not None and served >= max_requests:
            return served
