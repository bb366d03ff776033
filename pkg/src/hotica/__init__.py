"""Online tensor ICA for CW MIMO Doppler radar vital-sign separation."""

from .easi import LearnConfig, OnlineResult, cf_ica_online, easi_delta, g_split_tanh, rms_scale
from .errors import ConfigError, DivergenceError, GeometryError
from .hot import (SensitivityProfile, hot_ica_online, identity_tensor4,
                  masked_weights, rms_scale4, separate4, update4, weight_tensor)
from .metrics import (SeparationReport, assign_channels, build_report,
                      convergence_time, interference_ratio, leakage)
from .scene import (AntennaSpec, ObstacleSpec, ScatterPoint, SceneConfig,
                    TargetVitals, directivity_gain, displacement, path_length,
                    synthesize_frame, synthesize_series)
from .spectral import (SpectrumFrame, Spectrogram, StftPlan, band_select,
                       find_peaks, make_spectrograms, normalize_rowmax,
                       stft_stream)

__version__ = "0.1.0"
