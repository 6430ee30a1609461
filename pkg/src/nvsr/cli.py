"""Command-line interface: simulate, sr, bench, lsd, demo."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bench import GRID_RATES_HZ, SYSTEMS, GridSpec, run_grid
from .degrade import DegradeSpec, resample_poly, simulate_lr
from .metrics import lsd_waveforms
from .pipeline import EXCHANGE_DIR_ENV, PipelineConfig, nvsr
from .signals import speech_like
from .vocoder import VocoderConfig
from .wavio import read_wav, write_wav


def _parse_rates(text: str) -> tuple[int, ...]:
    """Comma-separated rates; values below 100 are kHz, otherwise Hz."""
    rates = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        value = float(token)
        rates.append(int(round(value * 1000 if value < 100 else value)))
    if not rates:
        raise argparse.ArgumentTypeError("no rates given")
    return tuple(rates)


def _parse_systems(text: str) -> tuple[str, ...]:
    systems = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = [s for s in systems if s not in SYSTEMS]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown systems {unknown}; choose from {', '.join(SYSTEMS)}"
        )
    return systems


def _cmd_simulate(args) -> int:
    y = read_wav(args.infile)
    spec = DegradeSpec(target_rate=args.target_rate, source_rate=y.sample_rate)
    x_l, x_h = simulate_lr(y, spec)
    if args.keep_lr:
        write_wav(args.keep_lr, x_l)
    write_wav(args.out, x_h)
    print(
        f"simulated {args.target_rate} Hz input: wrote {args.out}"
        + (f" and {args.keep_lr}" if args.keep_lr else "")
    )
    return 0


def _cmd_sr(args) -> int:
    x = read_wav(args.infile)
    cfg = PipelineConfig(
        predictor=args.predictor,
        vocoder=VocoderConfig(gl_iterations=args.gl_iters),
        postproc=not args.no_postproc,
        cutoff_hz=args.cutoff_hz,
        exchange_dir=args.exchange_dir,
        exchange_timeout_s=args.exchange_timeout,
    )
    out = nvsr(x, cfg)
    write_wav(args.out, out)
    print(f"super-resolved {args.infile} ({x.sample_rate} Hz) -> {args.out} (44100 Hz)")
    return 0


def _cmd_bench(args) -> int:
    spec = GridSpec(
        manifest=Path(args.manifest),
        rates=args.rates,
        systems=args.systems,
        split=args.split,
        limit=args.limit,
        jobs=args.jobs,
        vocoder=VocoderConfig(gl_iterations=args.gl_iters),
        exchange_dir=args.exchange_dir,
        exchange_timeout_s=args.exchange_timeout,
    )
    outcome = run_grid(
        spec, progress=(None if args.quiet else lambda s: print(s, file=sys.stderr))
    )
    from .report import summary_markdown, write_report

    paths = write_report(outcome, args.out)
    print(summary_markdown(outcome))
    written = ", ".join(str(p) for p in paths.values() if p is not None)
    print(f"\nwrote {written}")
    if outcome.failures:
        print(f"{len(outcome.failures)} row(s) failed; see failures CSV", file=sys.stderr)
        return 1
    return 0


def _cmd_lsd(args) -> int:
    ref = read_wav(args.ref)
    est = read_wav(args.est)
    if est.sample_rate != ref.sample_rate:
        est = resample_poly(est, ref.sample_rate)
    print(f"{lsd_waveforms(ref, est):.6f}")
    return 0


def _cmd_demo(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(args.count):
        w = speech_like(duration_s=args.duration, seed=args.seed + i)
        name = f"utt{i:03d}.wav"
        write_wav(out_dir / name, w)
        lines.append(f"{name}\ttest")
    manifest = out_dir / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.count} synthetic utterances and {manifest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nvsr",
        description="Speech super-resolution to 44.1 kHz via mel bandwidth extension.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="band-limit a recording to a lower rate")
    sim.add_argument("--in", dest="infile", required=True, help="input WAV")
    sim.add_argument(
        "--target-rate", type=int, required=True, help="simulated input rate in Hz"
    )
    sim.add_argument("--keep-lr", help="also write the low-rate WAV here")
    sim.add_argument("--out", required=True, help="output WAV at the source rate")
    sim.set_defaults(func=_cmd_simulate)

    sr = sub.add_parser("sr", help="super-resolve a WAV to 44.1 kHz")
    sr.add_argument("--in", dest="infile", required=True, help="input WAV")
    sr.add_argument("--out", required=True, help="output WAV")
    sr.add_argument(
        "--predictor", choices=("pad", "external", "none"), default="pad"
    )
    sr.add_argument(
        "--no-postproc",
        action="store_true",
        help="skip low-band replacement after synthesis",
    )
    sr.add_argument(
        "--cutoff-hz",
        type=float,
        default=None,
        help="known input bandwidth; otherwise detected from energy",
    )
    sr.add_argument(
        "--exchange-dir",
        default=None,
        help=f"external predictor exchange directory (or ${EXCHANGE_DIR_ENV})",
    )
    sr.add_argument("--exchange-timeout", type=float, default=60.0)
    sr.add_argument("--gl-iters", type=int, default=32)
    sr.set_defaults(func=_cmd_sr)

    bench = sub.add_parser("bench", help="run the evaluation grid over a manifest")
    bench.add_argument("--manifest", required=True)
    bench.add_argument(
        "--rates",
        type=_parse_rates,
        default=GRID_RATES_HZ,
        help="comma-separated input rates in kHz (default 2,4,8,12,16,24,32)",
    )
    bench.add_argument(
        "--systems",
        type=_parse_systems,
        default=("unprocessed", "pad"),
        help=f"comma-separated from: {', '.join(SYSTEMS)}",
    )
    bench.add_argument("--out", default="report.csv", help="report CSV path")
    bench.add_argument("--split", default=None, help="restrict to a manifest split tag")
    bench.add_argument("--limit", type=int, default=None, help="first N utterances")
    bench.add_argument("--jobs", type=int, default=1, help="worker processes")
    bench.add_argument("--gl-iters", type=int, default=32)
    bench.add_argument("--exchange-dir", default=None)
    bench.add_argument("--exchange-timeout", type=float, default=60.0)
    bench.add_argument("--quiet", action="store_true")
    bench.set_defaults(func=_cmd_bench)

    dist = sub.add_parser("lsd", help="log-spectral distance between two WAVs")
    dist.add_argument("--ref", required=True)
    dist.add_argument("--est", required=True)
    dist.set_defaults(func=_cmd_lsd)

    demo = sub.add_parser("demo", help="generate synthetic utterances + manifest")
    demo.add_argument("--out-dir", required=True)
    demo.add_argument("--count", type=int, default=20)
    demo.add_argument("--duration", type=float, default=2.0)
    demo.add_argument("--seed", type=int, default=0)
    demo.set_defaults(func=_cmd_demo)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
