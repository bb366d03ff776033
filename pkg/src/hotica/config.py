"""Experiment configuration: TOML schema, validation, and round-trip dump.

A config file has four sections: [scene] with nested [[scene.targets]],
[[scene.tx]], [[scene.rx]], [[scene.obstacles]] tables, plus [stft],
[learn], and [separator]. See the README for the full schema; every
simulator and learning parameter is expressible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .easi import LearnConfig
from .errors import ConfigError
from .hot import SensitivityProfile
from .scene import (AntennaSpec, ObstacleSpec, ScatterPoint, SceneConfig,
                    TargetVitals)
from .spectral import StftPlan

SEPARATORS = ("cf", "hot")


@dataclass
class ExperimentConfig:
    """Everything needed to run one experiment end to end."""

    scene: SceneConfig
    plan: StftPlan
    learn: LearnConfig
    profile: SensitivityProfile
    separator: str = "hot"
    name: str = "custom"

    def __post_init__(self):
        if self.separator not in SEPARATORS:
            raise ConfigError("separator.kind", f"must be one of {SEPARATORS}")
        n_tx, n_rx = self.scene.shape
        if (len(self.profile.eta_tx) != n_tx
                or len(self.profile.eta_rx) != n_rx):
            raise ConfigError(
                "separator.eta", f"profile lengths {len(self.profile.eta_tx)}/"
                f"{len(self.profile.eta_rx)} do not match scene {n_tx}x{n_rx}")


_MISSING = object()


def _get(d: dict, key: str, path: str, kind=None, default=_MISSING):
    if key not in d:
        if default is not _MISSING:
            return default
        raise ConfigError(f"{path}.{key}", "missing required key")
    value = d[key]
    if kind is not None and not isinstance(value, kind):
        if kind is float and isinstance(value, int):
            return float(value)
        raise ConfigError(f"{path}.{key}",
                          f"expected {getattr(kind, '__name__', kind)}, "
                          f"got {type(value).__name__}")
    return value


def _vec2(d: dict, key: str, path: str, default=_MISSING):
    if key not in d:
        if default is _MISSING:
            raise ConfigError(f"{path}.{key}", "missing required key")
        return default
    v = d[key]
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(c, (int, float)) for c in v)):
        raise ConfigError(f"{path}.{key}", "expected a [x, y] pair of numbers")
    return (float(v[0]), float(v[1]))


def _target_from_dict(d: dict, path: str) -> ScatterPoint:
    position = _vec2(d, "position", path)
    axis = _vec2(d, "displacement_axis", path, default=None)
    if axis is None:
        # default: chest faces the array origin
        norm = math.hypot(*position)
        if norm == 0:
            raise ConfigError(f"{path}.displacement_axis",
                              "required for a target at the origin")
        axis = (-position[0] / norm, -position[1] / norm)
    try:
        vitals = TargetVitals(
            resp_amplitude=_get(d, "resp_amplitude", path, float),
            resp_freq=_get(d, "resp_freq", path, float),
            heart_amplitude=_get(d, "heart_amplitude", path, float),
            heart_freq=_get(d, "heart_freq", path, float),
            resp_phase=_get(d, "resp_phase", path, float, 0.0),
            heart_phase=_get(d, "heart_phase", path, float, 0.0),
        )
        return ScatterPoint(position, vitals, axis)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _antenna_from_dict(d: dict, path: str) -> AntennaSpec:
    try:
        return AntennaSpec(
            position=_vec2(d, "position", path),
            boresight=_vec2(d, "boresight", path, default=(0.0, 1.0)),
            directivity_exponent=_get(d, "directivity_exponent", path, float, 2.0),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def _obstacle_from_dict(d: dict, path: str) -> ObstacleSpec:
    try:
        return ObstacleSpec(
            blocked_target=_get(d, "blocked_target", path, int),
            blocked_rx=_get(d, "blocked_rx", path, int),
            attenuation_db=_get(d, "attenuation_db", path, float),
            noise_boost_db=_get(d, "noise_boost_db", path, float, 0.0),
        )
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def config_from_dict(data: dict, name: str = "custom") -> ExperimentConfig:
    scene_d = _get(data, "scene", "", dict)
    try:
        scene = SceneConfig(
            targets=tuple(_target_from_dict(t, f"scene.targets[{i}]")
                          for i, t in enumerate(_get(scene_d, "targets", "scene", list))),
            tx=tuple(_antenna_from_dict(a, f"scene.tx[{i}]")
                     for i, a in enumerate(_get(scene_d, "tx", "scene", list))),
            rx=tuple(_antenna_from_dict(a, f"scene.rx[{i}]")
                     for i, a in enumerate(_get(scene_d, "rx", "scene", list))),
            wavelength=_get(scene_d, "wavelength", "scene", float),
            scatter_coeff=_get(scene_d, "scatter_coeff", "scene", float),
            noise_coeff=_get(scene_d, "noise_coeff", "scene", float),
            sample_rate=_get(scene_d, "sample_rate", "scene", float),
            duration=_get(scene_d, "duration", "scene", float),
            obstacles=tuple(_obstacle_from_dict(o, f"scene.obstacles[{i}]")
                            for i, o in enumerate(_get(scene_d, "obstacles", "scene",
                                                       list, []))),
            rng_seed=_get(scene_d, "rng_seed", "scene", int, 0),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("scene", str(exc)) from exc

    stft_d = _get(data, "stft", "", dict)
    try:
        plan = StftPlan(
            window_len=_get(stft_d, "window_len", "stft", int),
            hop=_get(stft_d, "hop", "stft", int),
            sample_rate=scene.sample_rate,
            band_lo=_get(stft_d, "band_lo", "stft", float),
            band_hi=_get(stft_d, "band_hi", "stft", float),
            taper=_get(stft_d, "taper", "stft", str, "rectangular"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("stft", str(exc)) from exc

    learn_d = _get(data, "learn", "", dict, {})
    try:
        learn = LearnConfig(
            learning_rate=_get(learn_d, "learning_rate", "learn", float, 0.005),
            nonlinearity=_get(learn_d, "nonlinearity", "learn", str, "split_tanh"),
            init=_get(learn_d, "init", "learn", str, "identity"),
            rms_floor=_get(learn_d, "rms_floor", "learn", float, 1e-12),
            init_seed=_get(learn_d, "init_seed", "learn", int, 0),
            bin_update=_get(learn_d, "bin_update", "learn", str, "sequential"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError("learn", str(exc)) from exc

    sep_d = _get(data, "separator", "", dict, {})
    n_tx, n_rx = scene.shape
    eta_tx = _get(sep_d, "eta_tx", "separator", list, [1.0] * n_tx)
    eta_rx = _get(sep_d, "eta_rx", "separator", list, [1.0] * n_rx)
    try:
        profile = SensitivityProfile(tuple(eta_tx), tuple(eta_rx))
    except ValueError as exc:
        raise ConfigError("separator.eta", str(exc)) from exc
    meta = _get(data, "meta", "", dict, {})
    return ExperimentConfig(
        scene=scene, plan=plan, learn=learn, profile=profile,
        separator=_get(sep_d, "kind", "separator", str, "hot"),
        name=_get(meta, "name", "meta", str, name),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"TOML parse error: {exc}") from exc
    return config_from_dict(data, name=path.stem)


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    scene = config.scene
    return {
        "meta": {"name": config.name},
        "scene": {
            "wavelength": scene.wavelength,
            "scatter_coeff": scene.scatter_coeff,
            "noise_coeff": scene.noise_coeff,
            "sample_rate": scene.sample_rate,
            "duration": scene.duration,
            "rng_seed": scene.rng_seed,
            "targets": [
                {"position": list(t.position),
                 "displacement_axis": list(t.displacement_axis),
                 "resp_amplitude": t.vitals.resp_amplitude,
                 "resp_freq": t.vitals.resp_freq,
                 "resp_phase": t.vitals.resp_phase,
                 "heart_amplitude": t.vitals.heart_amplitude,
                 "heart_freq": t.vitals.heart_freq,
                 "heart_phase": t.vitals.heart_phase}
                for t in scene.targets],
            "tx": [{"position": list(a.position), "boresight": list(a.boresight),
                    "directivity_exponent": a.directivity_exponent}
                   for a in scene.tx],
            "rx": [{"position": list(a.position), "boresight": list(a.boresight),
                    "directivity_exponent": a.directivity_exponent}
                   for a in scene.rx],
            "obstacles": [
                {"blocked_target": o.blocked_target, "blocked_rx": o.blocked_rx,
                 "attenuation_db": o.attenuation_db,
                 "noise_boost_db": o.noise_boost_db}
                for o in scene.obstacles],
        },
        "stft": {
            "window_len": config.plan.window_len,
            "hop": config.plan.hop,
            "band_lo": config.plan.band_lo,
            "band_hi": config.plan.band_hi,
            "taper": config.plan.taper,
        },
        "learn": {
            "learning_rate": config.learn.learning_rate,
            "nonlinearity": config.learn.nonlinearity,
            "init": config.learn.init,
            "rms_floor": config.learn.rms_floor,
            "init_seed": config.learn.init_seed,
            "bin_update": config.learn.bin_update,
        },
        "separator": {
            "kind": config.separator,
            "eta_tx": list(config.profile.eta_tx),
            "eta_rx": list(config.profile.eta_rx),
        },
    }


def _toml_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__} to TOML")


def dump_config(config: ExperimentConfig) -> str:
    """Serialize a config back to TOML text (inverse of load_config)."""
    data = config_to_dict(config)
    lines: list[str] = []
    for section, content in data.items():
        scalars, tables = {}, {}
        for k, v in content.items():
            if isinstance(v, list) and all(isinstance(x, dict) for x in v):
                tables[k] = v
            else:
                scalars[k] = v
        lines.append(f"[{section}]")
        for k, v in scalars.items():
            lines.append(f"{k} = {_toml_value(v)}")
        lines.append("")
        for k, rows in tables.items():
            for row in rows:
                lines.append(f"[[{section}.{k}]]")
                for rk, rv in row.items():
                    lines.append(f"{rk} = {_toml_value(rv)}")
                lines.append("")
    return "\n".join(lines)
