"""File formats: mixed-series CSV, versioned binary arrays, run manifests.

The binary container is little-endian throughout: 8 magic bytes
"HOTICA01", a uint32 rank, uint32 dimensions, then the complex payload as
interleaved float64 (re, im) pairs in C order. It round-trips any complex
array bit-exactly, so replayed separations match in-memory runs.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"HOTICA01"


def write_complex_bin(path: str | Path, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype=complex)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        inter = np.empty(arr.size * 2)
        inter[0::2] = arr.real.ravel()
        inter[1::2] = arr.imag.ravel()
        fh.write(inter.astype("<f8").tobytes())


def read_complex_bin(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        (ndim,) = struct.unpack("<I", fh.read(4))
        shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
        count = 2 * int(np.prod(shape)) if shape else 2
        data = np.frombuffer(fh.read(8 * count), dtype="<f8")
    if data.size != count:
        raise ValueError(f"{path}: truncated payload")
    return (data[0::2] + 1j * data[1::2]).reshape(shape)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_series_csv(path: str | Path, series: np.ndarray,
                     sample_rate: float) -> None:
    """Mixed series as CSV rows (t, tx, rx, re, im); '.' decimal, no locale."""
    series = np.asarray(series)
    n, n_tx, n_rx = series.shape
    with open(path, "w") as fh:
        fh.write("t,tx,rx,re,im\n")
        for i in range(n):
            t = _fmt(i / sample_rate)
            for m in range(n_tx):
                for r in range(n_rx):
                    v = series[i, m, r]
                    fh.write(f"{t},{m + 1},{r + 1},{_fmt(v.real)},{_fmt(v.imag)}\n")


def write_spectra_csv(path: str | Path, t_d: int, bin_freqs: np.ndarray,
                      values: np.ndarray, labels: list[str],
                      mag_norm: np.ndarray) -> None:
    """One window's spectra: rows (t_d, freq, channel, re, im, mag_norm)."""
    with open(path, "w") as fh:
        fh.write("t_d,freq_hz,channel,re,im,mag_norm\n")
        for b, f in enumerate(bin_freqs):
            for c, label in enumerate(labels):
                v = values[b, c]
                fh.write(f"{t_d},{_fmt(float(f))},{label},{_fmt(v.real)},"
                         f"{_fmt(v.imag)},{_fmt(float(mag_norm[b, c]))}\n")


def write_spectrogram_csv(path: str | Path, t_ds: np.ndarray,
                          bin_freqs: np.ndarray, outputs: np.ndarray,
                          labels: list[str], mag_norm: np.ndarray) -> None:
    """All windows' spectra: rows (t_d, freq, channel, re, im, mag_norm)."""
    with open(path, "w") as fh:
        fh.write("t_d,freq_hz,channel,re,im,mag_norm\n")
        for w, t_d in enumerate(t_ds):
            for b, f in enumerate(bin_freqs):
                for c, label in enumerate(labels):
                    v = outputs[w, b, c]
                    fh.write(f"{t_d},{_fmt(float(f))},{label},{_fmt(v.real)},"
                             f"{_fmt(v.imag)},{_fmt(float(mag_norm[w, b, c]))}\n")


def write_trajectory_csv(path: str | Path, t_ds: np.ndarray,
                         b_trajectory: np.ndarray, rms_pre: np.ndarray,
                         labels: list[str]) -> None:
    """Per-window Frobenius norm of B and pre-scale channel RMS values."""
    flat_rms = rms_pre.reshape(rms_pre.shape[0], -1)
    norms = np.linalg.norm(b_trajectory.reshape(b_trajectory.shape[0], -1), axis=1)
    with open(path, "w") as fh:
        fh.write("t_d,b_frobenius," + ",".join(f"rms_{l}" for l in labels) + "\n")
        for w, t_d in enumerate(t_ds):
            row = ",".join(_fmt(float(v)) for v in flat_rms[w])
            fh.write(f"{t_d},{_fmt(float(norms[w]))},{row}\n")


def sha256_of(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(config_dict: dict) -> str:
    return hashlib.sha256(
        json.dumps(config_dict, sort_keys=True).encode()).hexdigest()


def write_manifest(path: str | Path, *, name: str, config_dict: dict,
                   seed: int, version: str, outputs: dict[str, Path],
                   wall_clock_s: float, status: str = "ok") -> dict:
    manifest = {
        "tool": "hotica",
        "version": version,
        "preset": name,
        "status": status,
        "seed": seed,
        "config_hash": config_hash(config_dict),
        "config": config_dict,
        "wall_clock_s": wall_clock_s,
        "outputs": {key: {"path": str(Path(p).name), "sha256": sha256_of(p)}
                    for key, p in outputs.items()},
    }
    Path(path).write_text(json.dumps(manifest, indent=2))
    return manifest


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
