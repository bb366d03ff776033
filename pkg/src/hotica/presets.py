"""Bundled experiment presets for the three reference scenarios.

clean3x3: three Tx, three Rx, four targets, no obstruction.
obstacle2x2_*: two Tx, two Rx, two targets, with an obstacle between
target 1 and Rx1 (-50 dB on that leg, +16 dB AGC noise on the Rx1 column),
run with the flat-matrix separator (cf), the tensor separator without
sensitivity control, or the tensor separator with eta_rx1 = 0.

Antennas sit interleaved on the x axis at 0.5 m spacing, boresight +y;
targets stand on an arc 2.5-4 m out, chests facing the array origin.
"""

from __future__ import annotations

import math

from .config import ExperimentConfig
from .easi import LearnConfig
from .hot import SensitivityProfile
from .scene import AntennaSpec, ObstacleSpec, ScatterPoint, SceneConfig, TargetVitals
from .spectral import StftPlan

WAVELENGTH = 0.1224          # 2.45 GHz ISM carrier
SCATTER_COEFF = 0.068
NOISE_COEFF = 0.5e-5
SAMPLE_RATE = 11.3
DURATION = 70.0
ATTENUATION_DB = -50.0
NOISE_BOOST_DB = 16.0

VITALS = (
    TargetVitals(0.5e-3, 0.40, 0.05e-3, 1.19, 0.0, 0.0),
    TargetVitals(0.5e-3, 0.31, 0.04e-3, 1.10, math.pi / 6, math.pi / 6),
    TargetVitals(0.5e-3, 0.71, 0.06e-3, 1.32, 3 * math.pi / 4, 3 * math.pi / 4),
    TargetVitals(0.5e-3, 0.53, 0.03e-3, 1.06, math.pi, math.pi),
)

PRESET_NAMES = ("clean3x3", "obstacle2x2_cf", "obstacle2x2_hot_nocontrol",
                "obstacle2x2_hot_control")


def _antenna(x: float) -> AntennaSpec:
    return AntennaSpec(position=(x, 0.0), boresight=(0.0, 1.0),
                       directivity_exponent=2.0)


def _target(vitals: TargetVitals, angle_deg: float, radius: float) -> ScatterPoint:
    a = math.radians(angle_deg)
    pos = (radius * math.sin(a), radius * math.cos(a))
    axis = (-pos[0] / radius, -pos[1] / radius)
    return ScatterPoint(pos, vitals, axis)


def _interleaved(n: int) -> tuple[tuple[AntennaSpec, ...], tuple[AntennaSpec, ...]]:
    xs = [(i - (2 * n - 1) / 2) * 0.5 for i in range(2 * n)]
    tx = tuple(_antenna(x) for x in xs[0::2])
    rx = tuple(_antenna(x) for x in xs[1::2])
    return tx, rx


def _plan() -> StftPlan:
    return StftPlan(window_len=256, hop=2, sample_rate=SAMPLE_RATE,
                    band_lo=0.17, band_hi=2.0, taper="rectangular")


def clean3x3_scene(seed: int = 0) -> SceneConfig:
    tx, rx = _interleaved(3)
    targets = (
        _target(VITALS[0], -40.0, 3.0),
        _target(VITALS[1], -13.0, 2.6),
        _target(VITALS[2], 13.0, 3.4),
        _target(VITALS[3], 40.0, 3.8),
    )
    return SceneConfig(targets=targets, tx=tx, rx=rx, wavelength=WAVELENGTH,
                       scatter_coeff=SCATTER_COEFF, noise_coeff=NOISE_COEFF,
                       sample_rate=SAMPLE_RATE, duration=DURATION, rng_seed=seed)


def obstacle2x2_scene(seed: int = 0) -> SceneConfig:
    tx, rx = _interleaved(2)
    targets = (
        _target(VITALS[0], -25.0, 2.8),
        _target(VITALS[1], 25.0, 3.2),
    )
    obstacle = ObstacleSpec(blocked_target=0, blocked_rx=0,
                            attenuation_db=ATTENUATION_DB,
                            noise_boost_db=NOISE_BOOST_DB)
    return SceneConfig(targets=targets, tx=tx, rx=rx, wavelength=WAVELENGTH,
                       scatter_coeff=SCATTER_COEFF, noise_coeff=NOISE_COEFF,
                       sample_rate=SAMPLE_RATE, duration=DURATION,
                       obstacles=(obstacle,), rng_seed=seed)


def get_preset(name: str, seed: int = 0) -> ExperimentConfig:
    learn = LearnConfig()
    if name == "clean3x3":
        return ExperimentConfig(scene=clean3x3_scene(seed), plan=_plan(),
                                learn=learn,
                                profile=SensitivityProfile.neutral(3, 3),
                                separator="hot", name=name)
    if name == "obstacle2x2_cf":
        return ExperimentConfig(scene=obstacle2x2_scene(seed), plan=_plan(),
                                learn=learn,
                                profile=SensitivityProfile.neutral(2, 2),
                                separator="cf", name=name)
    if name == "obstacle2x2_hot_nocontrol":
        return ExperimentConfig(scene=obstacle2x2_scene(seed), plan=_plan(),
                                learn=learn,
                                profile=SensitivityProfile.neutral(2, 2),
                                separator="hot", name=name)
    if name == "obstacle2x2_hot_control":
        return ExperimentConfig(scene=obstacle2x2_scene(seed), plan=_plan(),
                                learn=learn,
                                profile=SensitivityProfile((1.0, 1.0), (0.0, 1.0)),
                                separator="hot", name=name)
    raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
