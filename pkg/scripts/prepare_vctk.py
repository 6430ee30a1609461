#!/usr/bin/env python3
"""Prepare the VCTK 0.92 corpus for the evaluation benchmark.

Converts the corpus' mic1 FLAC recordings to 44.1 kHz mono WAV files and
writes a manifest with train/test split tags. Speakers p280 and p315 are
dropped (known recording issues); the last eight speakers (p360, p361, p362,
p363, p364, p374, p376, s5) form the test split, all others the train split.

Requires the `soundfile` package for FLAC decoding:

    pip install soundfile

Usage:

    python3 scripts/prepare_vctk.py --vctk-root /data/VCTK-Corpus-0.92 \
        --out-dir /data/vctk44 [--test-only]

Then point the benchmark (or NVSR_VCTK_DIR for the test suite) at the output
directory, which contains the converted WAVs and manifest.txt.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from nvsr.degrade import resample_poly
from nvsr.dsp import SAMPLE_RATE, Waveform
from nvsr.wavio import write_wav

DROPPED_SPEAKERS = frozenset({"p280", "p315"})
TEST_SPEAKERS = ("p360", "p361", "p362", "p363", "p364", "p374", "p376", "s5")


def find_flac_root(vctk_root: Path) -> Path:
    for name in ("wav48_silence_trimmed", "wav48"):
        cand = vctk_root / name
        if cand.is_dir():
            return cand
    raise FileNotFoundError(
        f"no wav48_silence_trimmed/ or wav48/ under {vctk_root}; "
        "expected an extracted VCTK 0.92 corpus"
    )


def load_flac(path: Path) -> Waveform:
    try:
        import soundfile
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise SystemExit(
            "FLAC decoding needs the soundfile package: pip install soundfile"
        ) from exc
    samples, rate = soundfile.read(path, dtype="float64", always_2d=True)
    return Waveform(samples.mean(axis=1), int(rate))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--vctk-root", required=True, type=Path,
                        help="extracted VCTK 0.92 directory")
    parser.add_argument("--out-dir", required=True, type=Path)
    parser.add_argument("--test-only", action="store_true",
                        help="convert only the eight test speakers")
    args = parser.parse_args(argv)

    flac_root = find_flac_root(args.vctk_root)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    n_done = 0
    for spk_dir in sorted(p for p in flac_root.iterdir() if p.is_dir()):
        speaker = spk_dir.name
        if speaker in DROPPED_SPEAKERS:
            continue
        split = "test" if speaker in TEST_SPEAKERS else "train"
        if args.test_only and split != "test":
            continue
        out_spk = args.out_dir / speaker
        out_spk.mkdir(exist_ok=True)
        for flac in sorted(spk_dir.glob("*_mic1.flac")):
            w = load_flac(flac)
            if w.sample_rate != SAMPLE_RATE:
                w = resample_poly(w, SAMPLE_RATE)
            peak = float(np.max(np.abs(w.samples))) if len(w) else 0.0
            if peak > 1.0:
                w = Waveform(w.samples / peak, w.sample_rate)
            rel = f"{speaker}/{flac.stem}.wav"
            write_wav(args.out_dir / rel, w)
            lines.append(f"{rel}\t{split}")
            n_done += 1
        print(f"{speaker}: done ({split})", file=sys.stderr)
    manifest = args.out_dir / "manifest.txt"
    manifest.write_text("\n".join(sorted(lines)) + "\n", encoding="utf-8")
    print(f"wrote {n_done} WAVs and {manifest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
