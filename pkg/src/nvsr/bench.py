"""Evaluation grid: degrade each utterance to each input rate, run each
system, score against the 44.1 kHz reference with the log-spectral distance.

Work items are (utterance, rate) pairs; systems needing the external
predictor run sequentially in the main process because the file exchange
serves one request at a time.
"""
from __future__ import annotations

import math
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .degrade import DegradeSpec, resample_poly, simulate_lr
from .dsp import SAMPLE_RATE, Waveform, default_filterbank, mel_of_waveform
from .metrics import lsd_waveforms
from .pipeline import PipelineConfig, fit_length, lfr_postprocess, nvsr
from .vocoder import VocoderConfig, synthesize
from .wavio import read_wav

GRID_RATES_HZ = (2000, 4000, 8000, 12000, 16000, 24000, 32000)

# Systems whose rows depend on the external predictor exchange.
EXTERNAL_SYSTEMS = frozenset({"external", "external-nopost"})

SYSTEMS = (
    "unprocessed",
    "pad",
    "pad-nopost",
    "none",
    "none-nopost",
    "external",
    "external-nopost",
    "gt_mel",
    "gt_mel-nopost",
    "groundtruth",
)


@dataclass(frozen=True)
class ManifestEntry:
    utterance_id: str
    path: Path
    split: str


@dataclass(frozen=True)
class EvalResult:
    utterance_id: str
    input_rate: int
    system: str
    lsd: float
    runtime_ms: float

    def __post_init__(self):
        if not (math.isfinite(self.lsd) and self.lsd >= 0):
            raise ValueError(f"lsd must be finite and >= 0, got {self.lsd}")


@dataclass(frozen=True)
class FailedRow:
    utterance_id: str
    input_rate: int
    system: str
    error: str


@dataclass(frozen=True)
class GridSpec:
    manifest: Path
    rates: tuple[int, ...] = GRID_RATES_HZ
    systems: tuple[str, ...] = ("unprocessed", "pad")
    target_rate: int = SAMPLE_RATE
    split: str | None = None
    limit: int | None = None
    jobs: int = 1
    vocoder: VocoderConfig = field(default_factory=VocoderConfig)
    exchange_dir: str | None = None
    exchange_timeout_s: float = 60.0

    def __post_init__(self):
        if not self.rates:
            raise ValueError("at least one input rate required")
        if any(r >= self.target_rate for r in self.rates):
            raise ValueError("all input rates must lie strictly below the target rate")
        unknown = [s for s in self.systems if s not in SYSTEMS]
        if unknown:
            raise ValueError(f"unknown systems {unknown}; choose from {SYSTEMS}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass
class RunOutcome:
    results: list[EvalResult]
    failures: list[FailedRow]

    def sorted_results(self) -> list[EvalResult]:
        return sorted(
            self.results, key=lambda r: (r.system, r.input_rate, r.utterance_id)
        )

    def mean_lsd(self) -> dict[tuple[str, int], float]:
        """Mean LSD per (system, input_rate)."""
        sums: dict[tuple[str, int], list[float]] = {}
        for r in self.results:
            sums.setdefault((r.system, r.input_rate), []).append(r.lsd)
        return {k: sum(v) / len(v) for k, v in sums.items()}


def load_manifest(
    path: str | Path, split: str | None = None, limit: int | None = None
) -> list[ManifestEntry]:
    """Parse a manifest of newline-delimited relative WAV paths.

    Each non-comment line is ``relative/path.wav`` optionally followed by a
    tab and a split tag (default tag: "test"). Paths resolve against the
    manifest's directory.
    """
    path = Path(path)
    root = path.parent
    entries = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rel, _, tag = line.partition("\t")
        rel = rel.strip()
        tag = tag.strip() or "test"
        if split is not None and tag != split:
            continue
        entries.append(
            ManifestEntry(
                utterance_id=rel.rsplit(".", 1)[0].replace("/", "_"),
                path=root / rel,
                split=tag,
            )
        )
    entries.sort(key=lambda e: e.utterance_id)
    if limit is not None:
        entries = entries[:limit]
    return entries


def _load_reference(path: Path, target_rate: int) -> Waveform:
    y = read_wav(path)
    if y.sample_rate != target_rate:
        y = resample_poly(y, target_rate)
    return y


def run_system(
    system: str,
    y_h: Waveform,
    x_l: Waveform,
    x_h: Waveform,
    rate: int,
    spec: GridSpec,
) -> Waveform:
    """Produce one system's 44.1 kHz estimate for a degraded utterance."""
    base = system.removesuffix("-nopost")
    postproc = not system.endswith("-nopost")
    if base == "unprocessed":
        return x_h
    if base == "groundtruth":
        return y_h
    if base == "gt_mel":
        fb = default_filterbank()
        w = synthesize(mel_of_waveform(y_h, fb), fb, spec.vocoder)
        w = fit_length(w, len(y_h))
        if postproc:
            w = lfr_postprocess(w, x_h, rate / 2)
        return w
    cfg = PipelineConfig(
        predictor=base,
        vocoder=spec.vocoder,
        postproc=postproc,
        cutoff_hz=rate / 2,
        exchange_dir=spec.exchange_dir,
        exchange_timeout_s=spec.exchange_timeout_s,
    )
    return nvsr(x_l, cfg)


def _eval_unit(
    entry: ManifestEntry, rate: int, systems: tuple[str, ...], spec: GridSpec
) -> tuple[list[EvalResult], list[FailedRow]]:
    """All requested systems for one (utterance, rate) pair."""
    results: list[EvalResult] = []
    failures: list[FailedRow] = []
    try:
        y_h = _load_reference(entry.path, spec.target_rate)
        x_l, x_h = simulate_lr(y_h, DegradeSpec(rate, spec.target_rate))
    except Exception as exc:
        msg = f"{type(exc).__name__}: {exc}"
        return [], [FailedRow(entry.utterance_id, rate, s, msg) for s in systems]
    for system in systems:
        t0 = time.perf_counter()
        try:
            est = run_system(system, y_h, x_l, x_h, rate, spec)
            score = lsd_waveforms(y_h, est)
        except Exception as exc:
            failures.append(
                FailedRow(
                    entry.utterance_id,
                    rate,
                    system,
                    f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}",
                )
            )
            continue
        results.append(
            EvalResult(
                utterance_id=entry.utterance_id,
                input_rate=rate,
                system=system,
                lsd=score,
                runtime_ms=(time.perf_counter() - t0) * 1000.0,
            )
        )
    return results, failures


def run_grid(spec: GridSpec, progress=None) -> RunOutcome:
    """Evaluate every (utterance, rate, system) cell of the grid.

    ``progress`` is an optional callable taking a human-readable string.
    Aggregation is order-independent; results come back stably sorted by
    (system, rate, utterance).
    """
    entries = load_manifest(spec.manifest, split=spec.split, limit=spec.limit)
    if not entries:
        raise ValueError(f"manifest {spec.manifest} has no matching entries")
    pooled = tuple(s for s in spec.systems if s not in EXTERNAL_SYSTEMS)
    external = tuple(s for s in spec.systems if s in EXTERNAL_SYSTEMS)
    units = [(e, r) for e in entries for r in spec.rates]
    outcome = RunOutcome([], [])

    def _absorb(res, fails, label):
        outcome.results.extend(res)
        outcome.failures.extend(fails)
        if progress:
            progress(f"{label}: {len(res)} ok, {len(fails)} failed")

    if pooled:
        if spec.jobs > 1:
            with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
                futures = [
                    pool.submit(_eval_unit, e, r, pooled, spec) for e, r in units
                ]
                for (e, r), fut in zip(units, futures):
                    res, fails = fut.result()
                    _absorb(res, fails, f"{e.utterance_id}@{r}")
        else:
            for e, r in units:
                res, fails = _eval_unit(e, r, pooled, spec)
                _absorb(res, fails, f"{e.utterance_id}@{r}")
    # One request/response at a time: the exchange directory is a serial
    # channel, so external rows never enter the pool.
    if external:
        for e, r in units:
            res, fails = _eval_unit(e, r, external, spec)
            _absorb(res, fails, f"{e.utterance_id}@{r} (external)")
    outcome.results = outcome.sorted_results()
    outcome.failures.sort(key=lambda f: (f.system, f.input_rate, f.utterance_id))
    return outcome
