import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from hotica.spectral import (StftPlan, band_select, find_peaks,
                             make_spectrograms, normalize_rowmax, stft_stream)

PLAN = StftPlan(window_len=256, hop=2, sample_rate=11.3,
                band_lo=0.17, band_hi=2.0)


def dft_brute(window: np.ndarray) -> np.ndarray:
    """Independent oracle: literal DFT sum, no FFT."""
    L = window.shape[0]
    tau = np.arange(L)
    k = np.arange(L)[:, None]
    return np.exp(-2j * np.pi * k * tau / L) @ window


def small_plan(**kw):
    base = dict(window_len=8, hop=2, sample_rate=8.0, band_lo=1.0, band_hi=3.0)
    base.update(kw)
    return StftPlan(**base)


class TestStftStream:
    def test_frame_count_scenario(self):
        series = np.zeros((791, 1), dtype=complex)
        assert len(stft_stream(series, PLAN)) == 268
        assert abs(len(stft_stream(series, PLAN)) - 267) <= 1

    def test_constant_series_dc_bin(self):
        series = np.ones((256, 1), dtype=complex)
        frame = stft_stream(series, PLAN)[0]
        mags = np.abs(frame.values[:, 0])
        assert mags[0] == pytest.approx(256.0)
        assert mags[1:].max() < 1e-9

    def test_pure_tone_peaks_at_nearest_bin(self):
        t = np.arange(791) / 11.3
        series = np.exp(2j * np.pi * 0.40 * t)[:, None]
        frame = band_select(stft_stream(series, PLAN)[0], PLAN)
        got_bin = np.argmax(np.abs(frame.values[:, 0]))
        # oracle: brute-force DFT of the same samples
        brute = dft_brute(series[:256, 0])
        idx = PLAN.band_indices()
        assert got_bin == np.argmax(np.abs(brute[idx]))
        assert frame.bin_freqs[got_bin] == pytest.approx(0.40, abs=0.0441)

    def test_window_placement(self):
        rng = np.random.default_rng(0)
        series = rng.standard_normal((300, 1)) + 1j * rng.standard_normal((300, 1))
        frames = stft_stream(series, PLAN)
        t_d = 5
        manual = np.fft.fft(series[t_d * 2:t_d * 2 + 256, 0])
        np.testing.assert_allclose(frames[t_d].values[:, 0], manual, rtol=1e-12)

    def test_too_short_series_raises(self):
        with pytest.raises(ValueError):
            stft_stream(np.zeros((100, 1)), PLAN)

    def test_matches_brute_force_dft(self):
        rng = np.random.default_rng(5)
        series = rng.standard_normal((280, 2)) + 1j * rng.standard_normal((280, 2))
        frames = stft_stream(series, PLAN)
        for t_d in (0, 3, len(frames) - 1):
            seg = series[t_d * 2:t_d * 2 + 256]
            want = np.stack([dft_brute(seg[:, c]) for c in range(2)], axis=1)
            got = frames[t_d].values
            assert np.abs(got - want).max() / np.abs(want).max() < 1e-9

    def test_hann_taper_applied(self):
        series = np.ones((256, 1), dtype=complex)
        plan = StftPlan(256, 2, 11.3, 0.17, 2.0, taper="hann")
        frame = stft_stream(series, plan)[0]
        assert np.abs(frame.values[0, 0]) == pytest.approx(np.hanning(256).sum())


class TestStftProperties:
    def test_linearity(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((270, 1)) + 1j * rng.standard_normal((270, 1))
        y = rng.standard_normal((270, 1)) + 1j * rng.standard_normal((270, 1))
        a, b = 2.0 - 1j, 0.5 + 3j
        fx = stft_stream(x, PLAN)[0].values
        fy = stft_stream(y, PLAN)[0].values
        fxy = stft_stream(a * x + b * y, PLAN)[0].values
        err = np.abs(fxy - (a * fx + b * fy)).max() / np.abs(fxy).max()
        assert err < 1e-9

    def test_shift_by_hop_maps_frames(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((300, 1)) + 1j * rng.standard_normal((300, 1))
        frames = stft_stream(x, PLAN)
        shifted = stft_stream(x[PLAN.hop:], PLAN)
        np.testing.assert_array_equal(shifted[0].values, frames[1].values)

    def test_parseval_full_window(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((256, 1)) + 1j * rng.standard_normal((256, 1))
        spec = stft_stream(x, PLAN)[0].values[:, 0]
        lhs = np.sum(np.abs(spec) ** 2)
        rhs = 256 * np.sum(np.abs(x[:, 0]) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-6)

    @settings(max_examples=25, deadline=None)
    @given(hnp.arrays(np.float64, (40, 2),
                      elements=st.floats(-100, 100, allow_nan=False)))
    def test_brute_force_equality_random(self, re):
        series = re + 0.5j * re[::-1]
        plan = small_plan()
        frames = stft_stream(series, plan)
        for f in frames:
            seg = series[f.t_d * plan.hop:f.t_d * plan.hop + plan.window_len]
            want = np.stack([dft_brute(seg[:, c]) for c in range(2)], axis=1)
            scale = max(np.abs(want).max(), 1.0)
            assert np.abs(f.values - want).max() / scale < 1e-9


class TestBandSelect:
    def test_scenario_band_bins(self):
        idx = PLAN.band_indices()
        assert idx[0] == 4 and idx[-1] == 45 and len(idx) == 42

    def test_all_positive_band(self):
        plan = small_plan(band_lo=0.5, band_hi=4.0)
        # bins at k*1.0 Hz for k=0..7; band keeps 1, 2, 3 and the Nyquist bin 4
        assert list(plan.band_indices()) == [1, 2, 3, 4]

    def test_degenerate_band_single_bin(self):
        plan = small_plan(band_lo=2.0, band_hi=2.0)
        assert list(plan.band_indices()) == [2]

    def test_empty_band_raises(self):
        plan = small_plan(band_lo=1.4, band_hi=1.6)
        with pytest.raises(ValueError):
            plan.band_indices()

    def test_band_select_restricts_frame(self):
        series = np.ones((260, 1), dtype=complex)
        frame = stft_stream(series, PLAN)[0]
        sel = band_select(frame, PLAN)
        assert sel.values.shape[0] == 42
        assert sel.bin_freqs[0] >= 0.17 and sel.bin_freqs[-1] <= 2.0
        assert np.all(np.diff(sel.bin_freqs) > 0)


class TestNormalizeRowmax:
    def test_two_values(self):
        out = normalize_rowmax([np.array([2.0]), np.array([4.0])])
        assert out[0][0] == 0.5 and out[1][0] == 1.0

    def test_single_value(self):
        assert normalize_rowmax([np.array([7.0])])[0][0] == 1.0

    def test_all_zero_raises(self):
        with pytest.raises(ValueError):
            normalize_rowmax([np.zeros(3), np.zeros(3)])

    def test_max_exactly_one(self):
        rng = np.random.default_rng(4)
        group = [rng.random(10) for _ in range(5)]
        out = normalize_rowmax(group)
        assert max(m.max() for m in out) == 1.0


class TestFindPeaks:
    FREQS = np.arange(40) * 0.1

    def test_two_tone(self):
        mags = np.zeros(40)
        mags[9], mags[27] = 1.0, 3.0
        got = find_peaks(self.FREQS, mags, 2)
        assert got == [(pytest.approx(2.7), 3.0), (pytest.approx(0.9), 1.0)]

    def test_monotone_has_no_peaks(self):
        assert find_peaks(self.FREQS, np.arange(40.0), 3) == []

    def test_plateau_reports_lowest_bin(self):
        mags = np.array([0.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0])
        got = find_peaks(np.arange(7.0), mags, 5)
        assert got == [(5.0, 2.0), (1.0, 1.0)]

    def test_requesting_more_than_exists(self):
        mags = np.array([0.0, 5.0, 0.0])
        got = find_peaks(np.arange(3.0), mags, 4)
        assert got == [(1.0, 5.0)]

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            find_peaks(self.FREQS, np.zeros(40), 0)


class TestSpectrogram:
    def test_joint_normalization_and_shape(self):
        outputs = np.zeros((5, 3, 2), dtype=complex)
        outputs[2, 1, 0] = 4.0          # global max lives in channel 0
        outputs[3, 2, 1] = 2.0
        grams = make_spectrograms(outputs, np.arange(5.0), np.arange(3.0))
        assert len(grams) == 2
        assert grams[0].magnitudes.max() == 1.0
        assert grams[1].magnitudes.max() == 0.5
        assert all(g.magnitudes.shape == (5, 3) for g in grams)
