"""Command line entry points: train, serve, predict."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .data import collect_wavs
from .melf import read_melf, write_melf
from .model import ResUNetSpec, load_checkpoint
from .serve import respond, serve
from .train import TrainConfig, train


def _parse_channels(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad channel list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="melpredict",
        description="ResUNet mel-band bandwidth-extension predictor",
    )
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a predictor on 44.1 kHz WAV files")
    t.add_argument("--data", required=True, help="directory of WAVs or a manifest file")
    t.add_argument("--out", required=True, help="output directory for checkpoint + curve")
    t.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    t.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    t.add_argument("--crop-frames", type=int, default=TrainConfig.crop_frames)
    t.add_argument("--lr", type=float, default=TrainConfig.lr)
    t.add_argument("--warmup-steps", type=int, default=TrainConfig.warmup_steps)
    t.add_argument("--decay", type=float, default=TrainConfig.decay_per_epoch)
    t.add_argument("--cutoff-min-hz", type=float, default=TrainConfig.cutoff_min_hz)
    t.add_argument("--cutoff-max-hz", type=float, default=TrainConfig.cutoff_max_hz)
    t.add_argument("--seed", type=int, default=TrainConfig.seed)
    t.add_argument(
        "--no-reshuffle",
        action="store_true",
        help="replay the identical draw sequence every epoch",
    )
    t.add_argument(
        "--channels",
        type=_parse_channels,
        default=ResUNetSpec.channels,
        help="comma-separated encoder channel plan",
    )
    t.add_argument("--convblocks", type=int, default=ResUNetSpec.convblocks_per_stage)

    s = sub.add_parser("serve", help="answer MELF requests on an exchange directory")
    s.add_argument("--exchange-dir", required=True)
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--poll-interval", type=float, default=0.05)
    s.add_argument("--idle-timeout", type=float, default=None)
    s.add_argument("--max-requests", type=int, default=None)
    s.add_argument("--quiet", action="store_true")

    r = sub.add_parser("predict", help="run one MELF file through a checkpoint")
    r.add_argument("--in", dest="infile", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--checkpoint", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        cfg = TrainConfig(
            epochs=args.epochs,
            batch_size=args.batch_size,
            crop_frames=args.crop_frames,
            lr=args.lr,
            warmup_steps=args.warmup_steps,
            decay_per_epoch=args.decay,
            cutoff_min_hz=args.cutoff_min_hz,
            cutoff_max_hz=args.cutoff_max_hz,
            seed=args.seed,
            reshuffle_each_epoch=not args.no_reshuffle,
        )
        spec = ResUNetSpec(channels=args.channels, convblocks_per_stage=args.convblocks)
        result = train(
            cfg,
            collect_wavs(args.data),
            args.out,
            spec=spec,
            progress=lambda s: print(s, file=sys.stderr),
        )
        print(f"checkpoint: {result.checkpoint_path}")
        print(f"curve: {result.curve_path}")
        return 0
    if args.command == "serve":
        served = serve(
            args.exchange_dir,
            args.checkpoint,
            poll_interval_s=args.poll_interval,
            idle_timeout_s=args.idle_timeout,
            max_requests=args.max_requests,
            log=None if args.quiet else (lambda s: print(s, file=sys.stderr)),
        )
        print(f"served {served} requests")
        return 0
    if args.command == "predict":
        model, meta = load_checkpoint(args.checkpoint)
        out = respond(model, meta, read_melf(args.infile))
        write_melf(args.out, out)
        print(f"wrote {Path(args.out).resolve()}")
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
