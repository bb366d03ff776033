"""Fourth-order tensor separation with per-antenna sensitivity control.

Instead of flattening the (Tx, Rx) grid into a vector, the separation
operator here is a rank-4 tensor B[a, b, g, d] mapping input channel
(g, d) to output channel (a, b):

    Y[a, b] = sum_{g, d} B[a, b, g, d] X[g, d]

Keeping the antenna axes intact lets the update be decomposed into
per-Tx and per-Rx contributions, each of which can be individually
down-weighted by a sensitivity coefficient eta in [0, 1] when an antenna
is known to be noisy or obstructed. With every eta at 1 the run is
numerically equivalent to plain EASI on the flattened channels.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .easi import (LearnConfig, OnlineResult, _diverged, channel_rms,
                   g_split_tanh, init_matrix)
from .errors import DivergenceError
from .spectral import SpectrumFrame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SensitivityProfile:
    """Per-antenna learning weights; 1.0 everywhere disables the control."""

    eta_tx: tuple[float, ...]
    eta_rx: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "eta_tx", tuple(float(e) for e in self.eta_tx))
        object.__setattr__(self, "eta_rx", tuple(float(e) for e in self.eta_rx))
        for e in self.eta_tx + self.eta_rx:
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"sensitivity coefficients must lie in [0, 1], got {e}")

    @classmethod
    def neutral(cls, n_tx: int, n_rx: int) -> "SensitivityProfile":
        return cls((1.0,) * n_tx, (1.0,) * n_rx)


def identity_tensor4(n_tx: int, n_rx: int) -> np.ndarray:
    """The unit of the (g, d) contraction: 1 where (a, b) == (g, d)."""
    return np.eye(n_tx * n_rx, dtype=complex).reshape(n_tx, n_rx, n_tx, n_rx)


def separate4(b4: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Contract the separation tensor against one grid or a batch of grids.

    `x` is (..., n_tx, n_rx); the contraction runs over its trailing pair.
    """
    b4 = np.asarray(b4)
    x = np.asarray(x)
    if b4.shape[2:] != x.shape[-2:] or b4.shape[:2] != b4.shape[2:]:
        raise ValueError(f"shape mismatch: B {b4.shape}, X {x.shape}")
    return np.einsum("abgd,...gd->...ab", b4, x)


def weight_tensor(y: np.ndarray, cfg: LearnConfig,
                  cross_sign: int = -1) -> np.ndarray:
    """Learning-weight tensor from one output grid or a batch of them.

    For a batch (n, tx, rx) the outer products are averaged over n. The
    default cross_sign of -1 puts a minus on the Y * conj(g(Y)) term, which
    makes the update the exact tensor form of the flattened matrix rule;
    +1 selects the alternative plus-sign convention.
    """
    if cross_sign not in (-1, 1):
        raise ValueError("cross_sign must be -1 or +1")
    y = np.asarray(y)
    if y.ndim == 2:
        y = y[None]
    n, n_tx, n_rx = y.shape
    gy = g_split_tanh(y)
    cov = np.einsum("nab,ngd->abgd", y, y.conj()) / n
    cross = np.einsum("nab,ngd->abgd", gy, y.conj()) / n
    anti = np.einsum("nab,ngd->abgd", y, gy.conj()) / n
    ident = identity_tensor4(n_tx, n_rx)
    return -cfg.learning_rate * (cov - ident + cross + cross_sign * anti)


def masked_weights(w4: np.ndarray, profile: SensitivityProfile) -> np.ndarray:
    """Apply per-antenna sensitivity to a learning-weight tensor.

    Splitting the update into per-Tx and per-Rx masked tensors covers every
    entry exactly twice, so the eta-weighted recombination reduces to the
    closed form W'[a,b,g,d] = (eta_tx[g] + eta_rx[d]) / 2 * W[a,b,g,d].
    With all eta at 1 the factor is exactly 1.0 and W is returned unchanged.
    """
    w4 = np.asarray(w4)
    eta_tx = np.asarray(profile.eta_tx)
    eta_rx = np.asarray(profile.eta_rx)
    if eta_tx.shape != (w4.shape[2],) or eta_rx.shape != (w4.shape[3],):
        raise ValueError(
            f"profile lengths {eta_tx.shape[0]}/{eta_rx.shape[0]} do not match "
            f"weight tensor trailing shape {w4.shape[2:]}")
    factor = 0.5 * (eta_tx[:, None] + eta_rx[None, :])
    return w4 * factor[None, None, :, :]


def update4(b4: np.ndarray, w4: np.ndarray) -> np.ndarray:
    """One learning step: B + (W contracted against B's leading pair)."""
    b4 = np.asarray(b4)
    w4 = np.asarray(w4)
    if b4.shape != w4.shape:
        raise ValueError(f"shape mismatch: B {b4.shape}, W {w4.shape}")
    return b4 + np.einsum("abez,ezgd->abgd", w4, b4)


def rms_scale4(b4: np.ndarray, y_bins: np.ndarray, cfg: LearnConfig) -> np.ndarray:
    """Rescale B so each output channel (a, b) has unit RMS over the bins.

    `y_bins` is (n_bins, n_tx, n_rx); sub-floor channels are left unscaled,
    as in the matrix driver.
    """
    rms = channel_rms(y_bins)
    clamped = rms < cfg.rms_floor
    if clamped.any():
        logger.warning("rms_scale4 clamped channels %s (RMS below %g)",
                       np.argwhere(clamped).tolist(), cfg.rms_floor)
    scale = 1.0 / np.where(clamped, 1.0, rms)
    return scale[:, :, None, None] * b4


def init_tensor4(n_tx: int, n_rx: int, cfg: LearnConfig) -> np.ndarray:
    return init_matrix(n_tx * n_rx, cfg).reshape(n_tx, n_rx, n_tx, n_rx)


def hot_ica_online(frames: list[SpectrumFrame], cfg: LearnConfig,
                   profile: SensitivityProfile | None = None,
                   cross_sign: int = -1) -> OnlineResult:
    """Online tensor separation over in-band STFT frames.

    Each frame's values must have shape (n_bins, n_tx, n_rx). The per-window
    schedule mirrors cf_ica_online exactly (rescale, separate, learn per
    cfg.bin_update), with every learning-weight tensor shaped by the
    sensitivity profile before its update contraction.
    """
    if not frames:
        raise ValueError("no frames to process")
    first = np.asarray(frames[0].values)
    if first.ndim != 3:
        raise ValueError("hot_ica_online expects frames shaped (n_bins, n_tx, n_rx)")
    n_bins, n_tx, n_rx = first.shape
    if profile is None:
        profile = SensitivityProfile.neutral(n_tx, n_rx)
    b = init_tensor4(n_tx, n_rx, cfg)
    traj = np.empty((len(frames), n_tx, n_rx, n_tx, n_rx), dtype=complex)
    outs = np.empty((len(frames), n_bins, n_tx, n_rx), dtype=complex)
    rms_pre = np.empty((len(frames), n_tx, n_rx))
    last_good = b
    for w, frame in enumerate(frames):
        x = np.asarray(frame.values)
        y_pre = separate4(b, x)
        rms_pre[w] = channel_rms(y_pre)
        b = rms_scale4(b, y_pre, cfg)
        y = separate4(b, x)
        if cfg.bin_update == "averaged":
            w4 = masked_weights(weight_tensor(y, cfg, cross_sign), profile)
            b = update4(b, w4)
        else:
            for xi in x:
                w4 = masked_weights(
                    weight_tensor(separate4(b, xi), cfg, cross_sign), profile)
                b = update4(b, w4)
                if _diverged(b):
                    break
        if _diverged(b):
            raise DivergenceError(
                w, last_good,
                OnlineResult(traj[:w].copy(), outs[:w].copy(),
                             np.asarray(frames[0].bin_freqs), rms_pre[:w].copy()))
        traj[w] = b
        outs[w] = y
        last_good = b
    return OnlineResult(traj, outs, np.asarray(frames[0].bin_freqs), rms_pre)
