import math
from dataclasses import replace

import numpy as np
import pytest

from hotica.errors import GeometryError
from hotica.presets import clean3x3_scene, obstacle2x2_scene
from hotica.scene import (AntennaSpec, ObstacleSpec, ScatterPoint, SceneConfig,
                          TargetVitals, directivity_gain, displacement,
                          path_length, synthesize_frame, synthesize_series)

H1 = TargetVitals(0.5e-3, 0.40, 0.05e-3, 1.19)
H4 = TargetVitals(0.5e-3, 0.53, 0.03e-3, 1.06, math.pi, math.pi)


def static_target(position, axis=(0.0, -1.0)):
    # amplitude 0 keeps the scatterer motionless
    still = TargetVitals(0.0, 1.0, 0.0, 1.0)
    return ScatterPoint(position, still, axis)


def single_path_scene(**overrides):
    kwargs = dict(
        targets=(static_target((0.0, 3.0)),),
        tx=(AntennaSpec((0.0, 0.0), directivity_exponent=0.0),),
        rx=(AntennaSpec((0.0, -1.0), directivity_exponent=0.0),),
        wavelength=0.1224, scatter_coeff=0.068, noise_coeff=0.0,
        sample_rate=10.0, duration=1.0, rng_seed=0,
    )
    kwargs.update(overrides)
    return SceneConfig(**kwargs)


class TestDisplacement:
    def test_zero_at_t0_with_zero_phase(self):
        assert displacement(H1, 0.0) == 0.0

    def test_quarter_period_value(self):
        # frozen from an independent scalar evaluation
        assert displacement(H1, 0.625) == pytest.approx(
            0.00045003854818796387, abs=1e-18)

    def test_phase_pi_vanishes_at_t0(self):
        assert abs(displacement(H4, 0.0)) < 1e-18

    def test_vectorized_over_time(self):
        t = np.array([0.0, 0.625])
        np.testing.assert_allclose(
            displacement(H1, t), [0.0, 0.00045003854818796387], atol=1e-18)


class TestPathLength:
    def test_static_distance(self):
        ant = AntennaSpec((0.0, 0.0))
        assert path_length(ant, static_target((0.0, 3.0)), 0.0) == pytest.approx(3.0)

    def test_motion_toward_antenna_shortens_path(self):
        ant = AntennaSpec((0.0, 0.0))
        # sin(pi/2) = 1 at t = 0 makes the displacement exactly 1e-3
        vit = TargetVitals(1e-3, 1.0, 0.0, 1.0, resp_phase=math.pi / 2)
        tgt = ScatterPoint((0.0, 3.0), vit, (0.0, -1.0))
        assert path_length(ant, tgt, 0.0) == pytest.approx(2.999, abs=1e-15)

    def test_perpendicular_axis_leaves_distance(self):
        ant = AntennaSpec((0.0, 0.0))
        vit = TargetVitals(1e-3, 1.0, 0.0, 1.0, resp_phase=math.pi / 2)
        tgt = ScatterPoint((0.0, 3.0), vit, (1.0, 0.0))
        assert path_length(ant, tgt, 0.0) == pytest.approx(3.0, abs=1e-18)

    def test_coincident_positions_raise(self):
        ant = AntennaSpec((0.0, 3.0))
        with pytest.raises(GeometryError):
            path_length(ant, static_target((0.0, 3.0)), 0.0)


class TestDirectivity:
    def test_isotropic(self):
        ant = AntennaSpec((0.0, 0.0), (0.0, 1.0), directivity_exponent=0.0)
        assert directivity_gain(ant, (-1.0, 0.0)) == 1.0

    def test_boresight_maximum(self):
        ant = AntennaSpec((0.0, 0.0), (0.0, 1.0), directivity_exponent=2.0)
        assert directivity_gain(ant, (0.0, 1.0)) == pytest.approx(1.0)

    def test_sixty_degrees_squared(self):
        ant = AntennaSpec((0.0, 0.0), (0.0, 1.0), directivity_exponent=2.0)
        toward = (math.sin(math.radians(60)), math.cos(math.radians(60)))
        assert directivity_gain(ant, toward) == pytest.approx(0.25)

    def test_backlobe_clipped_to_zero(self):
        ant = AntennaSpec((0.0, 0.0), (0.0, 1.0), directivity_exponent=2.0)
        assert directivity_gain(ant, (0.0, -1.0)) == 0.0


class TestSynthesizeFrame:
    def test_no_targets_no_noise_is_zero(self):
        scene = single_path_scene(targets=())
        rng = np.random.default_rng(0)
        np.testing.assert_array_equal(
            synthesize_frame(scene, 0.0, rng), np.zeros((1, 1)))

    def test_single_path_closed_form(self):
        scene = single_path_scene()
        rng = np.random.default_rng(0)
        got = synthesize_frame(scene, 0.0, rng)[0, 0]
        l1, l2 = 3.0, 4.0
        want = 0.068 * np.exp(2j * np.pi * (l1 + l2) / 0.1224) / (l1 * l2)
        assert got == pytest.approx(want, rel=1e-12)

    def test_obstacle_attenuates_blocked_leg(self):
        blocked = single_path_scene(
            obstacles=(ObstacleSpec(0, 0, attenuation_db=-50.0),))
        free = single_path_scene()
        rng = np.random.default_rng(0)
        vb = synthesize_frame(blocked, 0.0, rng)[0, 0]
        vf = synthesize_frame(free, 0.0, rng)[0, 0]
        assert abs(vb) / abs(vf) == pytest.approx(10 ** -2.5, abs=1e-12)


class TestSynthesizeSeries:
    def test_sample_count(self):
        scene = single_path_scene(duration=1.0, sample_rate=10.0)
        assert len(synthesize_series(scene)) == 10

    def test_scenario_a_sample_count(self):
        scene = clean3x3_scene()
        assert scene.n_samples == 791
        assert abs(scene.n_samples - 790) <= 1  # reference tolerance

    def test_same_seed_identical(self):
        scene = single_path_scene(noise_coeff=1e-3, rng_seed=42)
        np.testing.assert_array_equal(synthesize_series(scene),
                                      synthesize_series(scene))

    def test_different_seeds_differ(self):
        a = synthesize_series(single_path_scene(noise_coeff=1e-3, rng_seed=1))
        b = synthesize_series(single_path_scene(noise_coeff=1e-3, rng_seed=2))
        assert np.abs(a - b).max() > 0

    def test_series_matches_frame_loop(self):
        scene = single_path_scene(noise_coeff=1e-3, rng_seed=7, duration=0.5)
        series = synthesize_series(scene)
        rng = np.random.default_rng(7)
        for i in range(scene.n_samples):
            frame = synthesize_frame(scene, i / scene.sample_rate, rng)
            np.testing.assert_array_equal(series[i], frame)

    def test_static_scene_constant_over_time(self):
        scene = single_path_scene(duration=2.0)
        series = synthesize_series(scene)
        np.testing.assert_array_equal(
            series, np.broadcast_to(series[0], series.shape))


class TestSceneProperties:
    def test_phase_deviation_doubles_with_displacement(self):
        # single path, amplitudes well below lambda/100
        def phase_dev(amp):
            vit = TargetVitals(amp, 1.0, 0.0, 1.0)
            tgt = ScatterPoint((0.0, 3.0), vit, (0.0, -1.0))
            scene = single_path_scene(targets=(tgt,), sample_rate=32.0)
            series = synthesize_series(scene)[:, 0, 0]
            ph = np.unwrap(np.angle(series))
            return ph.max() - ph.min()

        small, double = phase_dev(2e-4), phase_dev(4e-4)
        assert double / small == pytest.approx(2.0, rel=0.01)

    def test_noise_variance_near_unit(self):
        scene = single_path_scene(targets=(), noise_coeff=1.0,
                                  sample_rate=1000.0, duration=120.0)
        series = synthesize_series(scene)
        assert len(series) >= 1e5
        var = np.var(series.real)
        assert abs(var - 1.0) < 0.03

    def test_noise_boost_scales_rx_column(self):
        scene = obstacle2x2_scene(seed=3)
        quiet = replace(scene, obstacles=(ObstacleSpec(0, 0, -50.0, 0.0),))
        boosted = synthesize_series(scene)
        base = synthesize_series(quiet)
        ratio = (boosted - base)  # noise delta appears only where boosted
        clean_field = synthesize_series(replace(quiet, noise_coeff=0.0))
        noise_quiet = base - clean_field
        factor = np.abs(boosted - clean_field)[:, :, 0] / np.abs(noise_quiet)[:, :, 0]
        np.testing.assert_allclose(factor, 10 ** (16 / 20), rtol=1e-9)
        np.testing.assert_array_equal(ratio[:, :, 1], 0)


class TestValidation:
    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            TargetVitals(-1.0, 0.4, 0.0, 1.0)

    def test_nonunit_axis_rejected(self):
        with pytest.raises(ValueError):
            ScatterPoint((0.0, 3.0), H1, (0.5, 0.5))

    def test_positive_attenuation_rejected(self):
        with pytest.raises(ValueError):
            ObstacleSpec(0, 0, attenuation_db=3.0)

    def test_obstacle_index_checked(self):
        with pytest.raises(ValueError):
            single_path_scene(obstacles=(ObstacleSpec(5, 0, -50.0),))
