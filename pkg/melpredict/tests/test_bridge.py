"""End-to-end: the primary's bench drives this package through the exchange.

The two processes share nothing but WAV files, the exchange directory, and
the MELF format: the bench subprocess degrades audio, sends mel requests, and
scores the vocoded output; the serve subprocess answers with the trained toy
checkpoint.
"""
import csv
import os
import subprocess
import sys
from collections import defaultdict

import pytest


def run_bench(manifest, out_csv, exchange, systems: str, env_extra=None):
    env = dict(os.environ, NVSR_EXCHANGE_DIR=str(exchange))
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [
            sys.executable,
            "-m",
            "nvsr.cli",
            "bench",
            "--manifest",
            str(manifest),
            "--rates",
            "8",
            "--systems",
            systems,
            "--gl-iters",
            "8",
            "--jobs",
            "1",
            "--out",
            str(out_csv),
            "--quiet",
        ],
        env=env,
        capture_output=True,
        text=True,
        timeout=900,
    )


def mean_lsd_by_system(out_csv):
    per = defaultdict(list)
    with open(out_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            per[row["system"]].append(float(row["lsd"]))
    return {system: sum(vals) / len(vals) for system, vals in per.items()}


@pytest.fixture(scope="module")
def served_exchange(toy_run, tmp_path_factory):
    _, result = toy_run
    exchange = tmp_path_factory.mktemp("exchange")
    server = subprocess.Popen(
        [
            sys.executable,
            "-m",
            "melpredict.cli",
            "serve",
            "--exchange-dir",
            str(exchange),
            "--checkpoint",
            str(result.checkpoint_path),
            "--poll-interval",
            "0.01",
            "--idle-timeout",
            "600",
            "--quiet",
        ]
    )
    try:
        yield exchange
    finally:
        server.terminate()
        server.wait(timeout=10)


class TestBridge:
    def test_external_system_beats_pad(
        self, corpus, served_exchange, tmp_path, acceptance
    ):
        _, held_paths = corpus
        manifest = held_paths[0].parent / "bridge.tsv"
        manifest.write_text(
            "".join(f"{p.name}\ttest\n" for p in held_paths), encoding="utf-8"
        )
        out_csv = tmp_path / "bridge.csv"
        proc = run_bench(manifest, out_csv, served_exchange, "pad,external")
        assert proc.returncode == 0, proc.stderr[-2000:]
        means = mean_lsd_by_system(out_csv)
        assert set(means) == {"pad", "external"}
        acceptance.check(
            "bridge-external-lsd-not-worse-than-pad",
            means["external"] <= means["pad"],
            f"mean LSD at 8 kHz: external {means['external']:.4f} "
            f"<= pad {means['pad']:.4f}",
        )

    def test_missing_server_reports_failure(self, corpus, tmp_path):
        """Without a responder the external rows fail but the run completes."""
        _, held_paths = corpus
        manifest = held_paths[0].parent / "solo.tsv"
        manifest.write_text(f"{held_paths[0].name}\ttest\n", encoding="utf-8")
        dead_exchange = tmp_path / "nobody-home"
        dead_exchange.mkdir()
        out_csv = tmp_path / "dead.csv"
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "nvsr.cli",
                "bench",
                "--manifest",
                str(manifest),
                "--rates",
                "8",
                "--systems",
                "external",
                "--gl-iters",
                "4",
                "--exchange-timeout",
                "1",
                "--out",
                str(out_csv),
                "--quiet",
            ],
            env=dict(os.environ, NVSR_EXCHANGE_DIR=str(dead_exchange)),
            capture_output=True,
            text=True,
            timeout=300,
        )
        assert proc.returncode == 1
        failures = out_csv.with_name(out_csv.stem + ".failures.csv")
        assert failures.exists()
