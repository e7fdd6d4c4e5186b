"""Local raster filters with replicate borders.

Each fast path has a slow reference next to it, used by the test suite.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .image import as_plane, check_same_shape


def check_radius(shape, r: int) -> int:
    if int(r) != r or r < 1:
        raise ConfigError(f"filter radius must be an integer >= 1, got {r}")
    r = int(r)
    if 2 * r + 1 > min(shape[:2]):
        raise ConfigError(f"window {2 * r + 1} does not fit a {shape[1]}x{shape[0]} raster")
    return r


def min_filter_naive(src, r: int) -> np.ndarray:
    """Square-window minimum by explicit per-pixel windows."""
    src = as_plane(src)
    r = check_radius(src.shape, r)
    h, w = src.shape
    padded = np.pad(src, r, mode="edge")
    out = np.empty_like(src)
    for i in range(h):
        for j in range(w):
            out[i, j] = padded[i:i + 2 * r + 1, j:j + 2 * r + 1].min()
    return out


def _running_min_rows(a: np.ndarray, r: int) -> np.ndarray:
    # van Herk / Gil-Werman along axis 1: block-wise prefix and suffix minima,
    # then one comparison per output sample.
    h, w = a.shape
    k = 2 * r + 1
    n_blocks = -(-(w + 2 * r) // k)
    total = n_blocks * k
    padded = np.empty((h, total), dtype=a.dtype)
    padded[:, r:r + w] = a
    padded[:, :r] = a[:, :1]
    padded[:, r + w:] = a[:, -1:]
    blocks = padded.reshape(h, n_blocks, k)
    prefix = np.minimum.accumulate(blocks, axis=2).reshape(h, total)
    suffix = np.minimum.accumulate(blocks[:, :, ::-1], axis=2)[:, :, ::-1].reshape(h, total)
    return np.minimum(suffix[:, :w], prefix[:, k - 1:k - 1 + w])


def min_filter_fast(src, r: int) -> np.ndarray:
    """Square-window minimum in O(1) comparisons per pixel, independent of ``r``."""
    src = as_plane(src)
    r = check_radius(src.shape, r)
    rows = _running_min_rows(src, r)
    return np.ascontiguousarray(_running_min_rows(np.ascontiguousarray(rows.T), r).T)


def box_filter(src, r: int) -> np.ndarray:
    """Mean over the (2r+1)^2 window via a summed-area table."""
    src = as_plane(src)
    r = check_radius(src.shape, r)
    h, w = src.shape
    k = 2 * r + 1
    # centring keeps prefix sums small, which bounds cancellation error
    offset = src.mean()
    padded = np.pad(src - offset, r, mode="edge")
    sat = np.zeros((h + 2 * r + 1, w + 2 * r + 1))
    np.cumsum(padded, axis=0, out=sat[1:, 1:])
    np.cumsum(sat[1:, 1:], axis=1, out=sat[1:, 1:])
    total = sat[k:, k:] - sat[:-k, k:] - sat[k:, :-k] + sat[:-k, :-k]
    return total / (k * k) + offset


def box_filter_naive(src, r: int) -> np.ndarray:
    src = as_plane(src)
    r = check_radius(src.shape, r)
    padded = np.pad(src, r, mode="edge")
    out = np.empty_like(src)
    for i in range(src.shape[0]):
        for j in range(src.shape[1]):
            out[i, j] = padded[i:i + 2 * r + 1, j:j + 2 * r + 1].mean()
    return out


def guided_filter(guide, src, r: int, eps: float) -> np.ndarray:
    """Edge-preserving smoothing of ``src`` steered by a single-channel ``guide``.

    Within every window the output is modelled as ``a * guide + b``; the
    per-window coefficients are averaged before being applied.
    """
    if not eps > 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    guide = as_plane(guide, "guide")
    src = as_plane(src, "src")
    check_same_shape(guide, src, names=("guide", "src"))
    r = check_radius(src.shape, r)
    mean_i = box_filter(guide, r)
    mean_p = box_filter(src, r)
    cov_ip = box_filter(guide * src, r) - mean_i * mean_p
    var_i = box_filter(guide * guide, r) - mean_i * mean_i
    a = cov_ip / (var_i + eps)
    b = mean_p - a * mean_i
    return box_filter(a, r) * guide + box_filter(b, r)


def guided_filter_naive(guide, src, r: int, eps: float) -> np.ndarray:
    """Direct evaluation of the local linear model, one window at a time."""
    if not eps > 0:
        raise ConfigError(f"eps must be > 0, got {eps}")
    guide = as_plane(guide, "guide")
    src = as_plane(src, "src")
    check_same_shape(guide, src, names=("guide", "src"))
    r = check_radius(src.shape, r)
    h, w = src.shape
    k = 2 * r + 1
    gp = np.pad(guide, r, mode="edge")
    sp = np.pad(src, r, mode="edge")
    a = np.empty((h, w))
    b = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            gw = gp[i:i + k, j:j + k]
            sw = sp[i:i + k, j:j + k]
            mg, ms = gw.mean(), sw.mean()
            a[i, j] = ((gw - mg) * (sw - ms)).mean() / (((gw - mg) ** 2).mean() + eps)
            b[i, j] = ms - a[i, j] * mg
    ap = np.pad(a, r, mode="edge")
    bp = np.pad(b, r, mode="edge")
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            out[i, j] = ap[i:i + k, j:j + k].mean() * guide[i, j] + bp[i:i + k, j:j + k].mean()
    return out
