"""Separation quality metrics: channel assignment, peaks, leakage, convergence.

ICA recovers sources up to permutation and scale, so evaluation starts by
matching output channels to targets through an exhaustive injective
assignment on normalized respiration-bin magnitudes. Steady-state metrics
are measured over the final third of the run; single-window readings are
too noisy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

import numpy as np

from .spectral import find_peaks


def nearest_bin(freqs: np.ndarray, target: float) -> int:
    return int(np.argmin(np.abs(np.asarray(freqs) - target)))


def final_third(n: int) -> slice:
    return slice(2 * n // 3, n)


@dataclass
class ChannelAssignment:
    """Injective map target index -> output channel; the rest are noise."""

    pairs: list[tuple[int, int]]      # (channel, target)
    score: float
    noise_channels: list[int]

    def channel_of(self, target: int) -> int:
        for ch, tgt in self.pairs:
            if tgt == target:
                return ch
        raise KeyError(target)


def assign_channels(spectra: np.ndarray, bin_freqs: np.ndarray,
                    resp_freqs: Sequence[float]) -> ChannelAssignment:
    """Match output channels to targets by respiration-bin magnitude.

    `spectra` is (n_channels, n_bins) of magnitudes. Each channel is
    normalized by its own maximum first, so the result is invariant under
    per-channel rescaling. All injective assignments are scored (channel
    counts here are small); ties resolve to the lexicographically smallest
    channel tuple.
    """
    spectra = np.abs(np.asarray(spectra))
    n_ch = spectra.shape[0]
    n_tgt = len(resp_freqs)
    if n_ch < n_tgt:
        raise ValueError(f"{n_ch} channels cannot cover {n_tgt} targets")
    maxes = spectra.max(axis=1, keepdims=True)
    normed = np.divide(spectra, maxes, out=np.zeros_like(spectra),
                       where=maxes > 0)
    bins = [nearest_bin(bin_freqs, f) for f in resp_freqs]
    best: tuple[float, tuple[int, ...]] | None = None
    for chans in permutations(range(n_ch), n_tgt):
        score = sum(normed[ch, bins[k]] for k, ch in enumerate(chans))
        if best is None or score > best[0]:
            best = (score, chans)
    score, chans = best
    pairs = [(ch, k) for k, ch in enumerate(chans)]
    noise = [c for c in range(n_ch) if c not in chans]
    return ChannelAssignment(pairs, float(score), noise)


def interference_ratio(magnitudes: np.ndarray, bin_freqs: np.ndarray,
                       own_resp_freq: float,
                       other_resp_freqs: Sequence[float]) -> float:
    """Own-respiration-bin magnitude over the worst other-target bin, in dB."""
    mags = np.abs(np.asarray(magnitudes))
    own = mags[nearest_bin(bin_freqs, own_resp_freq)]
    others = max(mags[nearest_bin(bin_freqs, f)] for f in other_resp_freqs)
    if others == 0.0:
        return math.inf
    return 20.0 * math.log10(own / others) if own > 0 else -math.inf


def convergence_time(magnitudes: np.ndarray, bin_freqs: np.ndarray,
                     times: np.ndarray, expected_freq: float) -> float | None:
    """Earliest window time after which the dominant bin stays on target.

    The dominant in-band bin must remain within one bin of the expected
    frequency for every remaining window. Returns None when the track never
    stabilizes.
    """
    mags = np.asarray(magnitudes)
    if mags.size == 0:
        raise ValueError("empty spectrogram")
    expected = nearest_bin(bin_freqs, expected_freq)
    dominant = np.argmax(mags, axis=1)
    on_target = np.abs(dominant - expected) <= 1
    # last False marks the final departure; converged right after it
    off = np.nonzero(~on_target)[0]
    first_stable = 0 if off.size == 0 else int(off[-1]) + 1
    if first_stable >= len(mags):
        return None
    return float(times[first_stable])


def leakage(magnitudes: np.ndarray, bin_freqs: np.ndarray,
            target_freqs: Sequence[float]) -> float:
    """Worst normalized magnitude at any target bin over the final third."""
    mags = np.abs(np.asarray(magnitudes))
    tail = mags[final_third(mags.shape[0])]
    if tail.size == 0:
        tail = mags
    bins = [nearest_bin(bin_freqs, f) for f in target_freqs]
    return float(tail[:, bins].max())


@dataclass
class TargetReport:
    target: int
    channel: int
    expected_resp_freq: float
    expected_heart_freq: float
    primary_freq: float | None
    primary_mag: float | None
    primary_error_hz: float | None
    secondary_freq: float | None
    secondary_mag: float | None
    secondary_error_hz: float | None
    interference_db: float
    convergence_s: float | None


@dataclass
class NoiseChannelReport:
    channel: int
    leakage: float


@dataclass
class SeparationReport:
    """Quantitative summary of one separation run."""

    targets: list[TargetReport]
    noise_channels: list[NoiseChannelReport]
    bin_width_hz: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "bin_width_hz": self.bin_width_hz,
            "metadata": self.metadata,
            "targets": [vars(t).copy() for t in self.targets],
            "noise_channels": [vars(n).copy() for n in self.noise_channels],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d: dict) -> "SeparationReport":
        return cls(
            targets=[TargetReport(**t) for t in d["targets"]],
            noise_channels=[NoiseChannelReport(**n) for n in d["noise_channels"]],
            bin_width_hz=d["bin_width_hz"],
            metadata=d.get("metadata", {}),
        )

    def format_table(self) -> str:
        lines = [
            f"{'target':>6} {'channel':>7} {'resp(Hz)':>9} {'primary':>9} "
            f"{'heart(Hz)':>9} {'secondary':>9} {'interf(dB)':>10} {'conv(s)':>8}"
        ]
        for t in self.targets:
            lines.append(
                f"{t.target:>6} {t.channel:>7} {t.expected_resp_freq:>9.3f} "
                f"{_fmt(t.primary_freq):>9} {t.expected_heart_freq:>9.3f} "
                f"{_fmt(t.secondary_freq):>9} {_fmt(t.interference_db, 1):>10} "
                f"{_fmt(t.convergence_s, 1):>8}")
        for n in self.noise_channels:
            lines.append(f" noise {n.channel:>7} leakage {n.leakage:.3f}")
        return "\n".join(lines)


def _fmt(v, digits: int = 3) -> str:
    if v is None:
        return "-"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.{digits}f}"


def build_report(outputs: np.ndarray, bin_freqs: np.ndarray, times: np.ndarray,
                 resp_freqs: Sequence[float], heart_freqs: Sequence[float],
                 metadata: dict | None = None) -> SeparationReport:
    """Full report from stacked separation outputs (n_windows, n_bins, n_ch).

    Channel axes beyond the first two dimensions are flattened in C order.
    Assignment and peak metrics use the mean magnitude over the final third
    of the run; leakage uses magnitudes normalized across all channels.
    """
    outputs = np.asarray(outputs)
    n_w, n_bins = outputs.shape[:2]
    mags = np.abs(outputs).reshape(n_w, n_bins, -1)
    steady = mags[final_third(n_w)].mean(axis=0).T      # (n_ch, n_bins)
    assignment = assign_channels(steady, bin_freqs, resp_freqs)
    gmax = mags.max()
    normed = mags / gmax if gmax > 0 else mags

    targets = []
    for ch, k in assignment.pairs:
        peaks = find_peaks(bin_freqs, steady[ch], 2)
        primary = peaks[0] if peaks else (None, None)
        secondary = peaks[1] if len(peaks) > 1 else (None, None)
        others = [f for i, f in enumerate(resp_freqs) if i != k]
        targets.append(TargetReport(
            target=k,
            channel=ch,
            expected_resp_freq=float(resp_freqs[k]),
            expected_heart_freq=float(heart_freqs[k]),
            primary_freq=primary[0],
            primary_mag=primary[1],
            primary_error_hz=(abs(primary[0] - resp_freqs[k])
                              if primary[0] is not None else None),
            secondary_freq=secondary[0],
            secondary_mag=secondary[1],
            secondary_error_hz=(abs(secondary[0] - heart_freqs[k])
                                if secondary[0] is not None else None),
            interference_db=interference_ratio(steady[ch], bin_freqs,
                                               resp_freqs[k], others)
            if others else math.inf,
            convergence_s=convergence_time(mags[:, :, ch], bin_freqs, times,
                                           resp_freqs[k]),
        ))
    noise = [NoiseChannelReport(ch, leakage(normed[:, :, ch], bin_freqs, resp_freqs))
             for ch in assignment.noise_channels]
    return SeparationReport(
        targets=sorted(targets, key=lambda t: t.target),
        noise_channels=noise,
        bin_width_hz=float(bin_freqs[1] - bin_freqs[0]) if n_bins > 1 else 0.0,
        metadata=metadata or {},
    )
