"""Image-quality (PSNR, SSIM) and depth-estimation metrics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigError, DimensionError, DomainError
from .image import DepthMap, as_plane, check_same_shape, luminance

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2
DEPTH_FIELDS = ("delta1", "delta2", "delta3", "rel", "sq_rel", "rms", "log10")


def psnr(a, b) -> float:
    """PSNR in dB for data in [0, 1]; identical inputs give ``PSNR_CAP``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shapes differ: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(1.0 / mse))


def _gaussian_taps(size=SSIM_WINDOW, sigma=SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x ** 2) / (2 * sigma ** 2))
    return g / g.sum()


def _filter_valid(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    k = taps.size
    rows = sliding_window_view(img, k, axis=1) @ taps
    return sliding_window_view(rows, k, axis=0) @ taps


def ssim(a, b):
    """Gaussian-windowed SSIM for planes in [0, 1].

    Returns ``(mean, map)``; the map covers window centres that fit entirely
    inside the image.
    """
    a = as_plane(a, "a")
    b = as_plane(b, "b")
    check_same_shape(a, b, names=("a", "b"))
    if min(a.shape) < SSIM_WINDOW:
        raise ConfigError(f"SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {a.shape}")
    g = _gaussian_taps()
    mu_a = _filter_valid(a, g)
    mu_b = _filter_valid(b, g)
    var_a = _filter_valid(a * a, g) - mu_a * mu_a
    var_b = _filter_valid(b * b, g) - mu_b * mu_b
    cov = _filter_valid(a * b, g) - mu_a * mu_b
    num = (2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2)
    den = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2)
    smap = num / den
    return float(smap.mean()), smap


def ssim_rgb(a, b) -> float:
    """SSIM of two RGB images, computed on luminance."""
    return ssim(luminance(a), luminance(b))[0]


@dataclass(frozen=True)
class DepthMetrics:
    delta1: float
    delta2: float
    delta3: float
    rel: float
    sq_rel: float
    rms: float
    log10: float

    def as_dict(self) -> dict:
        return asdict(self)


def _shared_valid(pred: DepthMap, gt: DepthMap):
    if pred.shape != gt.shape:
        raise DimensionError(f"pred {pred.shape} vs gt {gt.shape}")
    mask = pred.mask & gt.mask
    if not mask.any():
        raise DomainError("no pixel is valid in both depth maps")
    return pred.values[mask], gt.values[mask]


def depth_metrics(pred: DepthMap, gt: DepthMap) -> DepthMetrics:
    p, g = _shared_valid(pred, gt)
    if (g <= 0).any():
        raise DomainError("ground-truth depth must be > 0 on valid pixels")
    if (p <= 0).any():
        raise DomainError("predicted depth must be > 0 on valid pixels")
    ratio = np.maximum(p / g, g / p)
    diff = p - g
    return DepthMetrics(
        delta1=float(np.mean(ratio < 1.25)),
        delta2=float(np.mean(ratio < 1.25 ** 2)),
        delta3=float(np.mean(ratio < 1.25 ** 3)),
        rel=float(np.mean(np.abs(diff) / g)),
        sq_rel=float(np.mean(diff ** 2 / g)),
        rms=float(np.sqrt(np.mean(diff ** 2))),
        log10=float(np.mean(np.abs(np.log10(p) - np.log10(g)))),
    )


@dataclass(frozen=True)
class Band:
    upper: float
    mean_abs_error: float
    count: int

    @property
    def empty(self) -> bool:
        return self.count == 0


def band_abs_error(pred: DepthMap, gt: DepthMap, band_width: float = 2.0,
                   max_depth: float = 80.0) -> list[Band]:
    """Mean |pred - gt| (meters) over pixels whose true depth is in (d - w, d].

    Bands run up to ``max_depth``; empty bands are kept with ``count == 0``
    and a NaN error.
    """
    if not band_width > 0:
        raise ConfigError(f"band_width must be > 0, got {band_width}")
    if not max_depth > 0:
        raise ConfigError(f"max_depth must be > 0, got {max_depth}")
    p, g = _shared_valid(pred, gt)
    err = np.abs(p - g)
    n_bands = math.ceil(max_depth / band_width - 1e-9)
    idx = np.ceil(g / band_width).astype(np.int64) - 1
    keep = (idx >= 0) & (idx < n_bands)
    counts = np.bincount(idx[keep], minlength=n_bands)
    sums = np.bincount(idx[keep], weights=err[keep], minlength=n_bands)
    bands = []
    for i in range(n_bands):
        mean = sums[i] / counts[i] if counts[i] else float("nan")
        bands.append(Band((i + 1) * band_width, float(mean), int(counts[i])))
    return bands
