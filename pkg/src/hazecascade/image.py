"""Raster conventions and small pixel-space helpers.

Planes are 2-D ``float64`` arrays of shape ``(height, width)``; RGB images
are ``(height, width, 3)`` arrays in [0, 1]; transmission maps are planes.
Depth maps carry a validity mask, so they get a small container type.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def as_plane(data, name: str = "plane") -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values at flat index {_first_bad(arr)}")
    return arr


def as_rgb(data, name: str = "image") -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values at flat index {_first_bad(arr)}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise DomainError(f"{name} values must lie in [0, 1]")
    return arr


def rgb_from_planes(r, g, b) -> np.ndarray:
    """Stack three equally sized planes into an RGB image."""
    planes = [as_plane(p, name) for p, name in ((r, "r"), (g, "g"), (b, "b"))]
    if len({p.shape for p in planes}) != 1:
        raise DimensionError(f"channel shapes differ: {[p.shape for p in planes]}")
    return as_rgb(np.stack(planes, axis=-1))


def check_same_shape(*arrays, names=None) -> None:
    shapes = [np.shape(a)[:2] for a in arrays]
    if len(set(shapes)) > 1:
        label = ", ".join(names) if names else "inputs"
        raise DimensionError(f"{label} have mismatched sizes {shapes}")


def luminance(img) -> np.ndarray:
    return np.asarray(img, dtype=np.float64) @ LUMA_WEIGHTS


def clamp_unit(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if np.isnan(arr).any():
        raise DomainError(f"NaN at flat index {int(np.flatnonzero(np.isnan(arr))[0])}")
    return np.clip(arr, 0.0, 1.0)


def _first_bad(arr: np.ndarray) -> int:
    return int(np.flatnonzero(~np.isfinite(arr))[0])


@dataclass(frozen=True)
class DepthMap:
    """Per-pixel depth in meters with a validity mask (True = has ground truth).

    Invalid pixels may hold any finite value; they are ignored everywhere.
    """

    values: np.ndarray
    mask: np.ndarray = field(default=None)

    def __post_init__(self):
        values = as_plane(self.values, "depth")
        mask = np.ones(values.shape, bool) if self.mask is None else np.asarray(self.mask, bool)
        if mask.shape != values.shape:
            raise DimensionError(f"mask shape {mask.shape} != depth shape {values.shape}")
        values = values.copy()
        values.flags.writeable = False
        mask = mask.copy()
        mask.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)
        self._check_values()

    def _check_values(self):
        bad = self.mask & (self.values < 0)
        if bad.any():
            raise DomainError(f"negative depth at pixel index {int(np.flatnonzero(bad)[0])}")

    @property
    def shape(self):
        return self.values.shape

    def valid(self) -> np.ndarray:
        """Values at valid pixels, in row-major order."""
        return self.values[self.mask]


class InverseDepthMap(DepthMap):
    """Reciprocal depth in 1/m, same masking rules as ``DepthMap``."""

    def _check_values(self):
        bad = self.mask & (self.values <= 0)
        if bad.any():
            raise DomainError(
                f"non-positive inverse depth at pixel index {int(np.flatnonzero(bad)[0])}"
            )


def reciprocal(depth: DepthMap) -> DepthMap:
    """Elementwise 1/d on valid pixels; maps depth <-> inverse depth both ways.

    Invalid pixels are set to 1 so the result stays finite.
    """
    bad = depth.mask & (depth.values <= 0)
    if bad.any():
        raise DomainError(f"non-positive value at pixel index {int(np.flatnonzero(bad)[0])}")
    out = np.ones_like(depth.values)
    np.divide(1.0, depth.values, out=out, where=depth.mask)
    cls = DepthMap if isinstance(depth, InverseDepthMap) else InverseDepthMap
    return cls(out, depth.mask)
