"""Streaming short-time Fourier transform, band selection, and peak tools.

All transforms follow the plain DFT convention

    X_k(t_d) = sum_{tau=0}^{L-1} x(tau + t_d*S) * exp(-j*2*pi*k*tau/L)

with window length L and hop S; bin k sits at frequency k * f_s / L.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

TAPERS = ("rectangular", "hann")


@dataclass(frozen=True)
class StftPlan:
    """Analysis parameters: window length, hop, and the learning band in Hz."""

    window_len: int
    hop: int
    sample_rate: float
    band_lo: float
    band_hi: float
    taper: str = "rectangular"

    def __post_init__(self):
        if not 0 < self.hop <= self.window_len:
            raise ValueError("hop must satisfy 0 < hop <= window_len")
        if not 0 < self.band_lo <= self.band_hi <= self.sample_rate / 2:
            raise ValueError("band must satisfy 0 < band_lo <= band_hi <= sample_rate/2")
        if self.taper not in TAPERS:
            raise ValueError(f"taper must be one of {TAPERS}")

    @property
    def bin_freqs(self) -> np.ndarray:
        """Frequencies of all window_len DFT bins."""
        return np.arange(self.window_len) * self.sample_rate / self.window_len

    def band_indices(self) -> np.ndarray:
        """Indices of the bins inside [band_lo, band_hi], inclusive."""
        freqs = self.bin_freqs
        idx = np.nonzero((freqs >= self.band_lo) & (freqs <= self.band_hi))[0]
        if idx.size == 0:
            raise ValueError(
                f"no DFT bin falls inside the band [{self.band_lo}, {self.band_hi}] Hz")
        return idx

    def window_time(self, t_d: int) -> float:
        """Start time in seconds of window t_d (the window spans window_len/f_s)."""
        return t_d * self.hop / self.sample_rate

    def frame_count(self, n_samples: int) -> int:
        if n_samples < self.window_len:
            raise ValueError(
                f"series of {n_samples} samples is shorter than one window "
                f"({self.window_len})")
        return (n_samples - self.window_len) // self.hop + 1

    def taper_values(self) -> np.ndarray:
        if self.taper == "hann":
            return np.hanning(self.window_len)
        return np.ones(self.window_len)


@dataclass
class SpectrumFrame:
    """One STFT output: complex values per (bin, *channel axes) at window t_d."""

    t_d: int
    values: np.ndarray
    bin_freqs: np.ndarray


def stft_stream(series: np.ndarray, plan: StftPlan) -> list[SpectrumFrame]:
    """STFT of a multichannel series, one SpectrumFrame per window.

    `series` has time on axis 0 and any channel axes after it. Window t_d
    covers samples [t_d*hop, t_d*hop + window_len).
    """
    series = np.asarray(series)
    n_frames = plan.frame_count(series.shape[0])
    taper = plan.taper_values().reshape((-1,) + (1,) * (series.ndim - 1))
    freqs = plan.bin_freqs
    frames = []
    for t_d in range(n_frames):
        start = t_d * plan.hop
        seg = series[start:start + plan.window_len] * taper
        frames.append(SpectrumFrame(t_d, np.fft.fft(seg, axis=0), freqs))
    return frames


def band_select(frame: SpectrumFrame, plan: StftPlan) -> SpectrumFrame:
    """Restrict a frame to the plan's in-band bins."""
    idx = plan.band_indices()
    return SpectrumFrame(frame.t_d, frame.values[idx], frame.bin_freqs[idx])


def normalize_rowmax(spectra: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Scale a group of magnitude arrays so their joint maximum is exactly 1.

    The group typically holds every channel of one figure row; ratios within
    and across the arrays are preserved.
    """
    mags = [np.abs(np.asarray(s)) for s in spectra]
    gmax = max((float(m.max()) for m in mags if m.size), default=0.0)
    if gmax == 0.0:
        raise ValueError("cannot normalize an all-zero spectrum group")
    return [m / gmax for m in mags]


def find_peaks(freqs: np.ndarray, magnitudes: np.ndarray,
               count: int) -> list[tuple[float, float]]:
    """Top `count` interior local maxima as (freq, magnitude), by magnitude.

    A plateau counts once, at its lowest-frequency bin; array endpoints are
    never peaks. Returns fewer than `count` entries (with a log notice) when
    the spectrum has fewer local maxima.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    mags = np.asarray(magnitudes, dtype=float)
    peaks = []
    i = 1
    while i < len(mags) - 1:
        j = i
        while j + 1 < len(mags) and mags[j + 1] == mags[i]:
            j += 1
        # run [i, j] of equal values; a peak if both strict neighbors are lower
        if j + 1 < len(mags) and mags[i] > mags[i - 1] and mags[i] > mags[j + 1]:
            peaks.append(i)
        i = j + 1
    peaks.sort(key=lambda k: (-mags[k], k))
    if len(peaks) < count:
        logger.info("requested %d peaks but found only %d", count, len(peaks))
    return [(float(freqs[k]), float(mags[k])) for k in peaks[:count]]


@dataclass
class Spectrogram:
    """Normalized magnitude track of one output channel over window time."""

    times: np.ndarray       # window start times, seconds
    freqs: np.ndarray       # bin frequencies, Hz
    magnitudes: np.ndarray  # (n_windows, n_bins), normalized to [0, 1]


def make_spectrograms(outputs: np.ndarray, times: np.ndarray,
                      freqs: np.ndarray) -> list[Spectrogram]:
    """Per-channel spectrograms from stacked separation outputs.

    `outputs` is (n_windows, n_bins, *channel axes); channel axes are
    flattened in C order. Magnitudes are normalized jointly so the global
    maximum across every channel is 1, mirroring row-wise figure scaling.
    """
    n_w, n_bins = outputs.shape[:2]
    flat = np.abs(outputs).reshape(n_w, n_bins, -1)
    mags = normalize_rowmax([flat[:, :, c] for c in range(flat.shape[2])])
    return [Spectrogram(times, freqs, m) for m in mags]
