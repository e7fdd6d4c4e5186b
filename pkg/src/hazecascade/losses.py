"""Depth-regression objectives on inverse-depth maps, with analytic gradients
where they are defined, plus the stage-summed total objective."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, DomainError
from .image import InverseDepthMap
from .metrics import ssim

DEFAULT_LAMBDA = 0.1


@dataclass(frozen=True)
class LossWeights:
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if not self.lam >= 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")


def _pair(pred: InverseDepthMap, gt: InverseDepthMap):
    if pred.shape != gt.shape:
        raise DimensionError(f"pred {pred.shape} vs gt {gt.shape}")
    mask = pred.mask & gt.mask
    n = int(mask.sum())
    if n == 0:
        raise DomainError("no pixel is valid in both maps")
    return pred.values, gt.values, mask, n


def l_depth(pred: InverseDepthMap, gt: InverseDepthMap):
    """Mean absolute difference over valid pixels. Returns ``(loss, d loss / d pred)``."""
    p, g, mask, n = _pair(pred, gt)
    diff = np.where(mask, p - g, 0.0)
    return float(np.abs(diff).sum() / n), np.sign(diff) / n


def _diffs(e: np.ndarray, mask: np.ndarray):
    # forward differences; zero on the last column/row and wherever either
    # end of the difference is invalid
    gh = np.zeros_like(e)
    gv = np.zeros_like(e)
    mh = mask[:, 1:] & mask[:, :-1]
    mv = mask[1:, :] & mask[:-1, :]
    gh[:, :-1] = np.where(mh, e[:, 1:] - e[:, :-1], 0.0)
    gv[:-1, :] = np.where(mv, e[1:, :] - e[:-1, :], 0.0)
    return gh, gv


def l_grad(pred: InverseDepthMap, gt: InverseDepthMap):
    """Mean of |horizontal| + |vertical| forward differences of ``pred - gt``.

    Returns ``(loss, d loss / d pred)``.
    """
    p, g, mask, n = _pair(pred, gt)
    gh, gv = _diffs(p - g, mask)
    loss = float((np.abs(gh) + np.abs(gv)).sum() / n)
    sh = np.sign(gh) / n
    sv = np.sign(gv) / n
    grad = -sh - sv
    grad[:, 1:] += sh[:, :-1]
    grad[1:, :] += sv[:-1, :]
    return loss, grad


def l_ssim_loss(pred: InverseDepthMap, gt: InverseDepthMap) -> float:
    """(1 - SSIM) / 2 after rescaling both maps jointly to [0, 1].

    Invalid pixels are set to 0 in both maps after rescaling.
    """
    p, g, mask, _ = _pair(pred, gt)
    lo = min(p[mask].min(), g[mask].min())
    span = max(p[mask].max(), g[mask].max()) - lo
    if span > 0:
        p = (p - lo) / span
        g = (g - lo) / span
    else:
        p = np.zeros_like(p)
        g = np.zeros_like(g)
    p = np.where(mask, p, 0.0)
    g = np.where(mask, g, 0.0)
    return (1.0 - ssim(p, g)[0]) / 2.0


def l_combined(pred: InverseDepthMap, gt: InverseDepthMap, w: LossWeights = LossWeights()) -> float:
    return w.lam * l_depth(pred, gt)[0] + l_grad(pred, gt)[0] + l_ssim_loss(pred, gt)


def l1(estimate, reference) -> float:
    """Mean absolute discrepancy, used for the transmission and airlight terms."""
    a = np.asarray(estimate, dtype=np.float64)
    b = np.asarray(reference, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shapes differ: {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a - b)))


@dataclass(frozen=True)
class LossBreakdown:
    depth: tuple
    transmission: tuple
    atmosphere: float | None
    dehaze: float | None
    total: float

    def as_dict(self) -> dict:
        return {
            "l_depth_stages": list(self.depth),
            "l_transmission_stages": list(self.transmission),
            "l_atmosphere": self.atmosphere,
            "l_dhaze": self.dehaze,
            "total": self.total,
        }


def total_objective(stage_depth_losses, stage_transmission_losses,
                    l_a: float | None = None, l_dhaze: float | None = None) -> LossBreakdown:
    """Sum of per-stage depth and transmission terms plus the airlight and
    reconstruction terms. ``None`` marks a term as not applicable."""
    d = tuple(float(v) for v in stage_depth_losses)
    t = tuple(float(v) for v in stage_transmission_losses)
    if len(d) != len(t):
        raise DimensionError(f"{len(d)} depth terms but {len(t)} transmission terms")
    for v in d + t + tuple(x for x in (l_a, l_dhaze) if x is not None):
        if not v >= 0:
            raise DomainError(f"loss terms must be non-negative, got {v}")
    # fsum is exactly rounded, so the total does not depend on stage order
    total = math.fsum(d + t + (l_a or 0.0, l_dhaze or 0.0))
    return LossBreakdown(d, t, l_a, l_dhaze, total)
