import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvsr import SAMPLE_RATE, MagSpectrogram, Waveform, lsd, lsd_waveforms
from nvsr.dsp import HOP, WINDOW_LEN
from nvsr.signals import speech_like, white_noise


def mag(m: np.ndarray) -> MagSpectrogram:
    return MagSpectrogram(m, WINDOW_LEN, HOP, SAMPLE_RATE)


def brute_force_lsd(ref: np.ndarray, est: np.ndarray, floor: float = 1e-8) -> float:
    total = 0.0
    t_frames, k_bins = ref.shape
    for t in range(t_frames):
        acc = 0.0
        for k in range(k_bins):
            a = max(ref[t, k], floor)
            b = max(est[t, k], floor)
            acc += (np.log10(a**2 / b**2)) ** 2
        total += np.sqrt(acc / k_bins)
    return total / t_frames


class TestLsd:
    def test_identity_exactly_zero(self, rng):
        y = mag(rng.uniform(0.1, 3.0, size=(7, 33)))
        assert lsd(y, y) == 0.0

    def test_scale_ten_is_two(self, rng):
        y = rng.uniform(0.1, 3.0, size=(7, 33))
        assert lsd(mag(y), mag(10.0 * y)) == pytest.approx(2.0, abs=1e-12)

    def test_matches_brute_force(self, rng):
        for _ in range(50):
            t = int(rng.integers(1, 6))
            k = int(rng.integers(1, 40))
            a = rng.uniform(0.0, 2.0, size=(t, k))
            b = rng.uniform(0.0, 2.0, size=(t, k))
            assert lsd(mag(a), mag(b)) == pytest.approx(
                brute_force_lsd(a, b), abs=1e-12
            )

    def test_floor_prevents_infinities(self, rng):
        a = rng.uniform(0.5, 1.0, size=(3, 8))
        z = np.zeros((3, 8))
        val = lsd(mag(a), mag(z))
        assert np.isfinite(val) and val > 0

    def test_symmetric(self, rng):
        a = rng.uniform(0.0, 2.0, size=(4, 16))
        b = rng.uniform(0.0, 2.0, size=(4, 16))
        assert lsd(mag(a), mag(b)) == pytest.approx(lsd(mag(b), mag(a)), abs=1e-12)

    def test_rejects_shape_mismatch_and_empty(self, rng):
        a = rng.uniform(0.1, 1.0, size=(3, 8))
        with pytest.raises(ValueError):
            lsd(mag(a), mag(a[:, :-1]))
        with pytest.raises(ValueError):
            lsd(mag(np.zeros((0, 8))), mag(np.zeros((0, 8))))

    @given(st.integers(min_value=0, max_value=2**31 - 1),
           st.floats(min_value=1.001, max_value=100.0))
    def test_scaling_law(self, seed, scale):
        y = np.random.default_rng(seed).uniform(0.1, 2.0, size=(3, 10))
        expected = 2.0 * abs(np.log10(scale))
        assert lsd(mag(y), mag(scale * y)) == pytest.approx(expected, rel=1e-9)


class TestLsdWaveforms:
    def test_identity_zero(self):
        w = speech_like(0.4, seed=5)
        assert lsd_waveforms(w, w) == 0.0

    def test_pads_shorter_operand(self):
        w = white_noise(0.5, seed=2)
        short = Waveform(w.samples[: len(w) - 2 * HOP], SAMPLE_RATE)
        v1 = lsd_waveforms(w, short)
        v2 = lsd_waveforms(short, w)
        assert np.isfinite(v1) and v1 > 0
        assert v1 == pytest.approx(v2, abs=1e-12)

    def test_rejects_rate_mismatch(self):
        a = white_noise(0.2, seed=0)
        b = Waveform(a.samples, 22050)
        with pytest.raises(ValueError):
            lsd_waveforms(a, b)

    def test_different_signals_positive(self):
        a = speech_like(0.4, seed=1)
        b = speech_like(0.4, seed=2)
        assert lsd_waveforms(a, b) > 0.5
