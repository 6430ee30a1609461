"""Report emission for the evaluation grid: CSV, markdown, and figures.

The CSV is the machine artifact and is byte-stable across runs of the same
configuration (fixed float formatting, stable row order, no timings). The
markdown table and the matplotlib figure are rendered next to it.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import RunOutcome
from .dsp import Waveform, stft

CSV_HEADER = "system,input_rate_hz,utterance,lsd"


def write_csv(outcome: RunOutcome, path: str | Path) -> Path:
    path = Path(path)
    lines = [CSV_HEADER]
    for r in outcome.sorted_results():
        lines.append(f"{r.system},{r.input_rate},{r.utterance_id},{r.lsd:.6f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_failures_csv(outcome: RunOutcome, path: str | Path) -> Path | None:
    """Failed rows, one line each, written only when failures exist."""
    if not outcome.failures:
        return None
    path = Path(path)
    lines = ["system,input_rate_hz,utterance,error"]
    for f in outcome.failures:
        first = f.error.strip().splitlines()[0].replace(",", ";")
        lines.append(f"{f.system},{f.input_rate},{f.utterance_id},{first}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _summary_grid(outcome: RunOutcome) -> tuple[list[str], list[int], dict]:
    means = outcome.mean_lsd()
    systems = sorted({s for s, _ in means})
    rates = sorted({r for _, r in means})
    return systems, rates, means


def summary_markdown(outcome: RunOutcome) -> str:
    """Mean LSD per (system, rate) as a markdown table with an AVG column."""
    systems, rates, means = _summary_grid(outcome)
    header = (
        "| system | "
        + " | ".join(f"{r / 1000:g} kHz" for r in rates)
        + " | AVG |"
    )
    sep = "|" + "---|" * (len(rates) + 2)
    rows = [header, sep]
    for s in systems:
        cells = []
        vals = []
        for r in rates:
            v = means.get((s, r))
            cells.append("-" if v is None else f"{v:.2f}")
            if v is not None:
                vals.append(v)
        avg = f"{sum(vals) / len(vals):.2f}" if vals else "-"
        rows.append(f"| {s} | " + " | ".join(cells) + f" | {avg} |")
    return "\n".join(rows)


def write_markdown(outcome: RunOutcome, path: str | Path) -> Path:
    path = Path(path)
    body = "# Evaluation summary\n\nMean log-spectral distance by system and input rate.\n\n"
    path.write_text(body + summary_markdown(outcome) + "\n", encoding="utf-8")
    return path


def write_summary_figure(outcome: RunOutcome, path: str | Path) -> Path:
    """Line plot of mean LSD against input rate, one line per system."""
    systems, rates, means = _summary_grid(outcome)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for s in systems:
        xs = [r for r in rates if (s, r) in means]
        ys = [means[(s, r)] for r in xs]
        ax.plot([x / 1000 for x in xs], ys, marker="o", label=s)
    ax.set_xlabel("input sampling rate (kHz)")
    ax.set_ylabel("mean LSD")
    ax.set_title("Super-resolution quality across input rates")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_spectrogram_png(w: Waveform, path: str | Path, title: str = "") -> Path:
    """Power spectrogram image in dB for visual inspection."""
    s = stft(w)
    power_db = 10.0 * np.log10(np.abs(s.bins.T) ** 2 + 1e-10)
    fig, ax = plt.subplots(figsize=(8, 4))
    im = ax.imshow(
        power_db,
        origin="lower",
        aspect="auto",
        extent=(0, w.duration, 0, w.sample_rate / 2000),
        cmap="magma",
        vmin=power_db.max() - 90,
        vmax=power_db.max(),
    )
    ax.set_xlabel("time (s)")
    ax.set_ylabel("frequency (kHz)")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="dB")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(outcome: RunOutcome, csv_path: str | Path) -> dict[str, Path]:
    """Write the CSV plus sibling markdown/figure/failure artifacts.

    Every path in the returned mapping exists; the "failures" entry is
    present only when at least one row failed.
    """
    csv_path = Path(csv_path)
    paths = {
        "csv": write_csv(outcome, csv_path),
        "markdown": write_markdown(outcome, csv_path.with_suffix(".md")),
        "figure": write_summary_figure(outcome, csv_path.with_suffix(".png")),
    }
    failures = write_failures_csv(
        outcome, csv_path.with_name(csv_path.stem + ".failures.csv")
    )
    if failures is not None:
        paths["failures"] = failures
    return paths
