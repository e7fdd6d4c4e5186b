"""Atmospheric scattering model: haze synthesis, inversion and the
depth/transmission exponential map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .image import DepthMap, as_plane, as_rgb, check_same_shape

DEFAULT_T_FLOOR = 0.05


@dataclass(frozen=True)
class AtmosphericLight:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for c in (self.r, self.g, self.b):
            if not (0.0 <= c <= 1.0):
                raise DomainError(f"atmospheric light components must be in [0, 1], got {c}")

    @classmethod
    def homogeneous(cls, value: float) -> "AtmosphericLight":
        return cls(value, value, value)

    @classmethod
    def from_array(cls, values) -> "AtmosphericLight":
        r, g, b = (float(v) for v in values)
        return cls(r, g, b)

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b])


@dataclass(frozen=True)
class ScatteringCoefficient:
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be > 0, got {self.beta}")

    def __float__(self):
        return float(self.beta)


def _beta(beta) -> float:
    return float(beta) if isinstance(beta, ScatteringCoefficient) else float(ScatteringCoefficient(beta))


def _light(A) -> np.ndarray:
    if isinstance(A, AtmosphericLight):
        return A.as_array()
    arr = np.broadcast_to(np.asarray(A, dtype=np.float64), (3,))
    return AtmosphericLight.from_array(arr).as_array()


def _check_floor(t_floor: float) -> float:
    if not (0.0 < t_floor <= 1.0):
        raise ConfigError(f"t_floor must be in (0, 1], got {t_floor}")
    return float(t_floor)


def transmission_from_depth(depth: DepthMap, beta) -> np.ndarray:
    """t = exp(-beta * d). Invalid depth pixels get t = 1."""
    t = np.exp(-_beta(beta) * depth.values)
    return np.where(depth.mask, t, 1.0)


def depth_from_transmission(t, beta, t_floor: float = DEFAULT_T_FLOOR) -> DepthMap:
    t_floor = _check_floor(t_floor)
    t = as_plane(t, "transmission")
    d = -np.log(np.maximum(t, t_floor)) / _beta(beta)
    # log(1) may come back as -0.0
    return DepthMap(np.maximum(d, 0.0))


def hazify(clear, t, A) -> np.ndarray:
    """Render haze: I = J t + A (1 - t), per channel."""
    clear = as_rgb(clear, "clear")
    t = as_plane(t, "transmission")
    check_same_shape(clear, t, names=("clear", "transmission"))
    t3 = t[..., None]
    return clear * t3 + _light(A) * (1.0 - t3)


def dehaze_with(hazy, t, A, t_floor: float = DEFAULT_T_FLOOR) -> np.ndarray:
    """Invert the scattering model given t and A; result clamped to [0, 1]."""
    t_floor = _check_floor(t_floor)
    hazy = as_rgb(hazy, "hazy")
    t = as_plane(t, "transmission")
    check_same_shape(hazy, t, names=("hazy", "transmission"))
    a = _light(A)
    j = (hazy - a) / np.maximum(t, t_floor)[..., None] + a
    return np.clip(j, 0.0, 1.0)


def reconstruction_residual(dehazed, t, A, hazy) -> float:
    """Mean L1 gap between the recomposed haze J t + A (1 - t) and the input."""
    dehazed = as_rgb(dehazed, "dehazed")
    hazy = as_rgb(hazy, "hazy")
    t = as_plane(t, "transmission")
    check_same_shape(dehazed, t, hazy, names=("dehazed", "transmission", "hazy"))
    t3 = t[..., None]
    recomposed = dehazed * t3 + _light(A) * (1.0 - t3)
    return float(np.mean(np.abs(recomposed - hazy)))
