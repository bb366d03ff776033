import pytest

from hotica.easi import cf_ica_online
from hotica.hot import hot_ica_online
from hotica.pipeline import in_band_frames
from hotica.presets import get_preset
from hotica.scene import synthesize_series
from hotica.spectral import SpectrumFrame


@pytest.fixture(scope="session")
def clean_cfg():
    return get_preset("clean3x3", seed=0)


@pytest.fixture(scope="session")
def clean_series(clean_cfg):
    return synthesize_series(clean_cfg.scene)


@pytest.fixture(scope="session")
def clean_frames(clean_cfg, clean_series):
    return in_band_frames(clean_series, clean_cfg.plan)


@pytest.fixture(scope="session")
def clean_frames_flat(clean_frames):
    return [SpectrumFrame(f.t_d, f.values.reshape(f.values.shape[0], -1),
                          f.bin_freqs) for f in clean_frames]


@pytest.fixture(scope="session")
def clean_hot_run(clean_cfg, clean_frames):
    return hot_ica_online(clean_frames, clean_cfg.learn)


@pytest.fixture(scope="session")
def clean_cf_run(clean_cfg, clean_frames_flat):
    return cf_ica_online(clean_frames_flat, clean_cfg.learn)
