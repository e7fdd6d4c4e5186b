"""Dark Channel Prior dehazing with guided-filter refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .filters import check_radius, guided_filter, min_filter_fast
from .image import as_plane, as_rgb, check_same_shape, luminance
from .scattering import DEFAULT_T_FLOOR, AtmosphericLight, _light, dehaze_with


@dataclass(frozen=True)
class DcpConfig:
    patch_radius: int = 7
    omega: float = 0.95
    top_fraction: float = 0.001
    guided_radius: int = 20
    guided_eps: float = 1e-3
    t_floor: float = DEFAULT_T_FLOOR

    def __post_init__(self):
        for name in ("patch_radius", "guided_radius"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {v}")
        if not 0 < self.omega <= 1:
            raise ConfigError(f"omega must be in (0, 1], got {self.omega}")
        if not 0 < self.top_fraction < 1:
            raise ConfigError(f"top_fraction must be in (0, 1), got {self.top_fraction}")
        if not self.guided_eps > 0:
            raise ConfigError(f"guided_eps must be > 0, got {self.guided_eps}")
        if not 0 < self.t_floor <= 1:
            raise ConfigError(f"t_floor must be in (0, 1], got {self.t_floor}")


def dark_channel(img, r: int) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ConfigError(f"expected an (H, W, 3) image, got {img.shape}")
    check_radius(img.shape, r)
    return min_filter_fast(img.min(axis=2), r)


def estimate_atmospheric_light(img, dark, top_fraction: float = 0.001) -> AtmosphericLight:
    """Average colour of the brightest ``top_fraction`` of dark-channel pixels.

    Ties in the dark channel go to the earlier pixel in row-major order.
    """
    if not 0 < top_fraction < 1:
        raise ConfigError(f"top_fraction must be in (0, 1), got {top_fraction}")
    img = as_rgb(img)
    dark = as_plane(dark, "dark channel")
    check_same_shape(img, dark, names=("image", "dark channel"))
    n = dark.size
    k = max(1, math.ceil(top_fraction * n))
    order = np.argsort(-dark.ravel(), kind="stable")[:k]
    return AtmosphericLight.from_array(img.reshape(-1, 3)[order].mean(axis=0))


def raw_transmission(img, A, omega: float, patch_radius: int) -> np.ndarray:
    a = _light(A)
    if np.any(a <= 0):
        raise DomainError(f"atmospheric light must be positive in every channel, got {a}")
    return 1.0 - omega * dark_channel(np.asarray(img) / a, patch_radius)


def dcp_transmission(img, A, cfg: DcpConfig = DcpConfig()) -> np.ndarray:
    img = as_rgb(img)
    t = raw_transmission(img, A, cfg.omega, cfg.patch_radius)
    t = guided_filter(luminance(img), t, cfg.guided_radius, cfg.guided_eps)
    return np.clip(t, cfg.t_floor, 1.0)


def dcp_dehaze(img, cfg: DcpConfig = DcpConfig()):
    """Full DCP pipeline. Returns ``(dehazed, transmission, atmospheric_light)``."""
    img = as_rgb(img)
    dark = dark_channel(img, cfg.patch_radius)
    A = estimate_atmospheric_light(img, dark, cfg.top_fraction)
    t = dcp_transmission(img, A, cfg)
    return dehaze_with(img, t, A, cfg.t_floor), t, A
