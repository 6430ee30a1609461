import pytest

from mp_speech import write_speech_wav

_ACCEPTANCE_LINES: list[str] = []


class AcceptanceRecorder:
    def check(self, name: str, ok: bool, detail: str = "") -> None:
        status = "PASS" if ok else "FAIL"
        line = f"[ACCEPTANCE] {name}: {status}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria (melpredict)")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """50 training WAVs plus 10 held-out WAVs, all 0.8 s at 44.1 kHz."""
    root = tmp_path_factory.mktemp("corpus")
    train_paths, held_paths = [], []
    for i in range(60):
        p = root / f"utt{i:02d}.wav"
        write_speech_wav(p, 0.8, seed=7000 + i)
        (train_paths if i < 50 else held_paths).append(p)
    return train_paths, held_paths


@pytest.fixture(scope="session")
def toy_run(corpus, tmp_path_factory):
    """One shared desk-scale training run (full architecture, 3 epochs)."""
    from melpredict import TrainConfig, train

    train_paths, _ = corpus
    cfg = TrainConfig(
        epochs=3,
        batch_size=4,
        crop_frames=256,
        warmup_steps=5,
        reshuffle_each_epoch=False,
        seed=0,
    )
    out = tmp_path_factory.mktemp("toyrun")
    return cfg, train(cfg, train_paths, out)
