import csv

import pytest

from melpredict import TrainConfig
from melpredict.train import learning_rate


class TestTrainConfig:
    def test_defaults(self):
        cfg = TrainConfig()
        assert cfg.epochs == 60
        assert cfg.batch_size == 8
        assert cfg.crop_frames == 256
        assert cfg.lr == 3e-4
        assert (cfg.beta1, cfg.beta2) == (0.5, 0.999)
        assert cfg.warmup_steps == 1000
        assert cfg.decay_per_epoch == 0.85
        assert (cfg.cutoff_min_hz, cfg.cutoff_max_hz) == (1000.0, 16000.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epochs": 0},
            {"batch_size": 0},
            {"crop_frames": 0},
            {"lr": 0.0},
            {"warmup_steps": -1},
            {"decay_per_epoch": 0.0},
            {"decay_per_epoch": 1.5},
            {"cutoff_min_hz": 20000.0, "cutoff_max_hz": 16000.0},
            {"cutoff_max_hz": 30000.0},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


class TestLearningRate:
    def test_halfway_through_warmup(self):
        cfg = TrainConfig(warmup_steps=1000)
        assert learning_rate(cfg, global_step=500, epoch=0) == pytest.approx(
            1.5e-4, rel=0, abs=0
        )

    def test_warmup_is_linear(self):
        cfg = TrainConfig(warmup_steps=1000)
        for step in (1, 250, 999):
            assert learning_rate(cfg, step, 0) == pytest.approx(3e-4 * step / 1000)

    def test_warmup_caps_at_base(self):
        cfg = TrainConfig(warmup_steps=1000)
        assert learning_rate(cfg, 1000, 0) == pytest.approx(3e-4)
        assert learning_rate(cfg, 5000, 0) == pytest.approx(3e-4)

    def test_epoch_decay_after_warmup(self):
        cfg = TrainConfig(warmup_steps=1000)
        assert learning_rate(cfg, 4000, 2) == pytest.approx(3e-4 * 0.85**2)
        assert learning_rate(cfg, 9000, 5) == pytest.approx(3e-4 * 0.85**5)

    def test_zero_warmup_skips_ramp(self):
        cfg = TrainConfig(warmup_steps=0)
        assert learning_rate(cfg, 0, 0) == pytest.approx(3e-4)

    def test_decay_applies_during_warmup(self):
        cfg = TrainConfig(warmup_steps=1000)
        assert learning_rate(cfg, 500, 1) == pytest.approx(1.5e-4 * 0.85)


class TestCurveMatchesClosedForm:
    def test_logged_lr_follows_schedule(self, toy_run):
        cfg, result = toy_run
        with open(result.curve_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows, "training curve is empty"
        for row in rows:
            want = learning_rate(cfg, int(row["global_step"]), int(row["epoch"]))
            assert float(row["lr"]) == pytest.approx(want, rel=1e-9)

    def test_steps_cover_every_epoch(self, toy_run):
        cfg, result = toy_run
        with open(result.curve_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert sorted({int(r["epoch"]) for r in rows}) == list(range(cfg.epochs))
        steps = [int(r["global_step"]) for r in rows]
        assert steps == sorted(steps)
        assert steps[0] == 1
