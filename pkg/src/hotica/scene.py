"""CW MIMO Doppler radar scene simulator.

Synthesizes the complex baseband samples seen by every (Tx, Rx) antenna
pair for a set of breathing/beating point targets. Each target's chest
displacement modulates the two-leg propagation path Tx -> target -> Rx;
the received field is the coherent sum over targets of

    d_tx * exp(j*2*pi*L_tx/lambda)/L_tx * sigma * d_rx * exp(j*2*pi*L_rx/lambda)/L_rx

plus circular complex receiver noise. An obstacle can attenuate one
target->Rx leg and boost the noise of that Rx column (AGC effect).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

_UNIT_TOL = 1e-12


def _as_vec2(value, name: str) -> np.ndarray:
    v = np.asarray(value, dtype=float)
    if v.shape != (2,):
        raise ValueError(f"{name} must be a 2-D coordinate, got shape {v.shape}")
    return v


def _check_unit(v: np.ndarray, name: str) -> np.ndarray:
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} must have unit norm (|v| = {np.linalg.norm(v)!r})")
    return v


@dataclass(frozen=True)
class TargetVitals:
    """Respiration and heartbeat motion parameters of one target.

    Amplitudes are chest displacements in meters, frequencies in Hz,
    phases in radians.
    """

    resp_amplitude: float
    resp_freq: float
    heart_amplitude: float
    heart_freq: float
    resp_phase: float = 0.0
    heart_phase: float = 0.0

    def __post_init__(self):
        if self.resp_amplitude < 0 or self.heart_amplitude < 0:
            raise ValueError("vital-sign amplitudes must be >= 0")
        if self.resp_freq <= 0 or self.heart_freq <= 0:
            raise ValueError("vital-sign frequencies must be > 0")


@dataclass(frozen=True)
class ScatterPoint:
    """A point target: position, vitals, and the direction its chest moves."""

    position: tuple[float, float]
    vitals: TargetVitals
    displacement_axis: tuple[float, float]

    def __post_init__(self):
        pos = _as_vec2(self.position, "position")
        axis = _check_unit(_as_vec2(self.displacement_axis, "displacement_axis"),
                           "displacement_axis")
        object.__setattr__(self, "position", (float(pos[0]), float(pos[1])))
        object.__setattr__(self, "displacement_axis",
                           (float(axis[0]), float(axis[1])))


@dataclass(frozen=True)
class AntennaSpec:
    """Antenna position, boresight direction, and directivity exponent.

    Gain toward a unit vector u is max(0, boresight . u) ** directivity_exponent;
    exponent 0 gives an isotropic antenna.
    """

    position: tuple[float, float]
    boresight: tuple[float, float] = (0.0, 1.0)
    directivity_exponent: float = 2.0

    def __post_init__(self):
        pos = _as_vec2(self.position, "position")
        bore = _check_unit(_as_vec2(self.boresight, "boresight"), "boresight")
        if self.directivity_exponent < 0:
            raise ValueError("directivity_exponent must be >= 0")
        object.__setattr__(self, "position", (float(pos[0]), float(pos[1])))
        object.__setattr__(self, "boresight", (float(bore[0]), float(bore[1])))


@dataclass(frozen=True)
class ObstacleSpec:
    """Obstruction of one target->Rx path.

    attenuation_db (<= 0) scales the blocked leg's amplitude for every Tx;
    noise_boost_db (>= 0) scales the noise drawn for that Rx column.
    """

    blocked_target: int
    blocked_rx: int
    attenuation_db: float
    noise_boost_db: float = 0.0

    def __post_init__(self):
        if self.attenuation_db > 0:
            raise ValueError("attenuation_db must be <= 0")
        if self.noise_boost_db < 0:
            raise ValueError("noise_boost_db must be >= 0")


@dataclass(frozen=True)
class SceneConfig:
    """Full description of a radar scene to synthesize."""

    targets: tuple[ScatterPoint, ...]
    tx: tuple[AntennaSpec, ...]
    rx: tuple[AntennaSpec, ...]
    wavelength: float
    scatter_coeff: float
    noise_coeff: float
    sample_rate: float
    duration: float
    obstacles: tuple[ObstacleSpec, ...] = ()
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "tx", tuple(self.tx))
        object.__setattr__(self, "rx", tuple(self.rx))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if self.wavelength <= 0:
            raise ValueError("wavelength must be > 0")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.scatter_coeff <= 0:
            raise ValueError("scatter_coeff must be > 0")
        if self.noise_coeff < 0:
            raise ValueError("noise_coeff must be >= 0")
        if not self.tx or not self.rx:
            raise ValueError("need at least one Tx and one Rx antenna")
        for obs in self.obstacles:
            if not 0 <= obs.blocked_target < len(self.targets):
                raise ValueError(f"obstacle blocks unknown target {obs.blocked_target}")
            if not 0 <= obs.blocked_rx < len(self.rx):
                raise ValueError(f"obstacle blocks unknown rx {obs.blocked_rx}")

    @property
    def n_samples(self) -> int:
        return round(self.duration * self.sample_rate)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.tx), len(self.rx)


def displacement(vitals: TargetVitals, t) -> np.ndarray | float:
    """Chest displacement at time t: sum of the respiration and heartbeat sines."""
    return (vitals.resp_amplitude
            * np.sin(2 * np.pi * vitals.resp_freq * t + vitals.resp_phase)
            + vitals.heart_amplitude
            * np.sin(2 * np.pi * vitals.heart_freq * t + vitals.heart_phase))


def _los(antenna: AntennaSpec, target: ScatterPoint) -> tuple[float, np.ndarray]:
    """Static distance and unit line-of-sight direction from target to antenna."""
    delta = np.asarray(antenna.position) - np.asarray(target.position)
    dist = float(np.linalg.norm(delta))
    if dist < 1e-9:
        raise GeometryError(
            f"target at {target.position} coincides with antenna at {antenna.position}")
    return dist, delta / dist


def path_length(antenna: AntennaSpec, target: ScatterPoint, t) -> np.ndarray | float:
    """One-leg propagation distance at time t.

    The static distance shrinks by the chest displacement projected on the
    target->antenna line of sight.
    """
    dist, los = _los(antenna, target)
    cos_theta = float(np.dot(los, target.displacement_axis))
    return dist - displacement(target.vitals, t) * cos_theta


def directivity_gain(antenna: AntennaSpec, toward) -> float:
    """Antenna gain toward a unit direction vector."""
    if antenna.directivity_exponent == 0:
        return 1.0
    c = max(0.0, float(np.dot(antenna.boresight, np.asarray(toward, dtype=float))))
    return c ** antenna.directivity_exponent


def _noise_boost(scene: SceneConfig) -> np.ndarray:
    """Per-Rx noise amplitude factors from obstacle AGC boosts."""
    boost = np.ones(len(scene.rx))
    for obs in scene.obstacles:
        boost[obs.blocked_rx] *= 10.0 ** (obs.noise_boost_db / 20.0)
    return boost


def _field_series(scene: SceneConfig, times: np.ndarray) -> np.ndarray:
    """Noise-free received field for every (Tx, Rx) pair at the given times.

    Returns a complex array of shape (len(times), n_tx, n_rx).
    """
    n_tx, n_rx = scene.shape
    lam = scene.wavelength
    out = np.zeros((len(times), n_tx, n_rx), dtype=complex)
    atten = {(o.blocked_target, o.blocked_rx): 10.0 ** (o.attenuation_db / 20.0)
             for o in scene.obstacles}
    for k, target in enumerate(scene.targets):
        w = displacement(target.vitals, times)
        tx_legs = []
        for ant in scene.tx:
            dist, los = _los(ant, target)
            length = dist - w * np.dot(los, target.displacement_axis)
            gain = directivity_gain(ant, -los)  # antenna looks toward the target
            tx_legs.append(gain * np.exp(2j * np.pi * length / lam) / length)
        rx_legs = []
        for n, ant in enumerate(scene.rx):
            dist, los = _los(ant, target)
            length = dist - w * np.dot(los, target.displacement_axis)
            gain = directivity_gain(ant, -los)
            leg = gain * np.exp(2j * np.pi * length / lam) / length
            rx_legs.append(leg * atten.get((k, n), 1.0))
        for m in range(n_tx):
            for n in range(n_rx):
                out[:, m, n] += tx_legs[m] * scene.scatter_coeff * rx_legs[n]
    return out


def _draw_noise(scene: SceneConfig, rng: np.random.Generator,
                boost: np.ndarray) -> np.ndarray:
    shape = scene.shape
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return scene.noise_coeff * (re + 1j * im) * boost[None, :]


def synthesize_frame(scene: SceneConfig, t: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Mixed complex samples of every (Tx, Rx) pair at time t, noise included."""
    field = _field_series(scene, np.asarray([t], dtype=float))[0]
    return field + _draw_noise(scene, rng, _noise_boost(scene))


def synthesize_series(scene: SceneConfig) -> np.ndarray:
    """Synthesize the full mixed time series, shape (n_samples, n_tx, n_rx).

    Samples are taken at t = i / sample_rate. Deterministic for a given
    rng_seed: the noise draw order is one (real, imag) block per frame, so
    the result is identical to calling synthesize_frame once per tick with
    a shared generator.
    """
    rng = np.random.default_rng(scene.rng_seed)
    times = np.arange(scene.n_samples, dtype=float) / scene.sample_rate
    series = _field_series(scene, times)
    boost = _noise_boost(scene)
    for i in range(len(times)):
        series[i] += _draw_noise(scene, rng, boost)
    return series
