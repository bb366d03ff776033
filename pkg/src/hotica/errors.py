"""Exception types shared across the package."""

from __future__ import annotations

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration value; message carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class GeometryError(ValueError):
    """Degenerate scene geometry (e.g. a target coincident with an antenna)."""


class DivergenceError(RuntimeError):
    """Online separation blew up.

    Carries the window index at which divergence was detected and the last
    finite separation operator, so callers can dump partial artifacts.
    """

    def __init__(self, window: int, last_good: np.ndarray, partial=None):
        self.window = window
        self.last_good = last_good
        self.partial = partial
        super().__init__(f"separation diverged at window {window}")
