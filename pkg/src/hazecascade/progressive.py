"""Alternating depth/transmission refinement.

Each stage maps the current depth to a transmission map, refines it with a
guided filter steered by the hazy luminance, and converts it back into the
next depth estimate. The scattering-model residual of every stage is kept so
progress can be monitored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dcp import (
    DcpConfig,
    dark_channel,
    dcp_transmission,
    estimate_atmospheric_light,
    raw_transmission,
)
from .errors import ConfigError, DimensionError, EstimationError
from .filters import guided_filter
from .image import DepthMap, as_plane, as_rgb, luminance
from .scattering import (
    DEFAULT_T_FLOOR,
    AtmosphericLight,
    ScatteringCoefficient,
    _beta,
    dehaze_with,
    depth_from_transmission,
    reconstruction_residual,
    transmission_from_depth,
)

log = logging.getLogger(__name__)

DEFAULT_BETA = 1.0


@dataclass(frozen=True)
class CascadeConfig:
    stages: int = 2
    beta: float | None = None  # None: estimate from external depth, else DEFAULT_BETA
    transmission_radius: int = 4
    transmission_eps: float = 1e-4
    depth_radius: int = 2
    depth_eps: float = 1e-5
    dcp: DcpConfig = field(default_factory=DcpConfig)
    t_floor: float = DEFAULT_T_FLOOR

    def __post_init__(self):
        if int(self.stages) != self.stages or self.stages < 1:
            raise ConfigError(f"stages must be an integer >= 1, got {self.stages}")
        if self.beta is not None:
            ScatteringCoefficient(self.beta)
        for name in ("transmission_radius", "depth_radius"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {v}")
        if not (self.transmission_eps > 0 and self.depth_eps > 0):
            raise ConfigError("guided filter eps values must be > 0")
        if not 0 < self.t_floor <= 1:
            raise ConfigError(f"t_floor must be in (0, 1], got {self.t_floor}")


@dataclass(frozen=True)
class StageEstimate:
    index: int
    depth: DepthMap
    transmission: np.ndarray
    residual: float


@dataclass(frozen=True)
class DehazeResult:
    dehazed: np.ndarray
    atmospheric_light: AtmosphericLight
    beta: float
    stages: tuple
    initial_depth: DepthMap
    initial_residual: float  # residual of the unrefined exp(-beta * d0) transmission


def initial_depth(hazy, cfg: CascadeConfig, external: DepthMap | None = None,
                  A=None, beta=None) -> DepthMap:
    """Starting depth: ``external`` if given, else derived from the DCP transmission."""
    hazy = as_rgb(hazy, "hazy")
    if external is not None:
        if external.shape != hazy.shape[:2]:
            raise DimensionError(
                f"external depth is {external.shape}, hazy image is {hazy.shape[:2]}"
            )
        return external
    if A is None:
        A = estimate_atmospheric_light(
            hazy, dark_channel(hazy, cfg.dcp.patch_radius), cfg.dcp.top_fraction
        )
    if beta is None:
        beta = cfg.beta if cfg.beta is not None else DEFAULT_BETA
    t = dcp_transmission(hazy, A, cfg.dcp)
    return depth_from_transmission(t, beta, cfg.t_floor)


def estimate_beta(t, depth_prior: DepthMap) -> ScatteringCoefficient:
    """Least-squares slope of -ln t against depth, through the origin."""
    t = as_plane(t, "transmission")
    if t.shape != depth_prior.shape:
        raise DimensionError(f"transmission {t.shape} vs depth {depth_prior.shape}")
    d = depth_prior.values
    use = depth_prior.mask & (t > 0) & (t < 1) & (d > 0)
    if not use.any():
        raise EstimationError("no pixels with 0 < t < 1 and positive depth")
    d = d[use]
    y = -np.log(t[use])
    beta = float(np.dot(d, y) / np.dot(d, d))
    if not beta > 0:
        raise EstimationError(f"fitted beta is not positive ({beta})")
    return ScatteringCoefficient(beta)


def fit_beta(hazy, A, depth_prior: DepthMap, t_floor: float = DEFAULT_T_FLOOR) -> ScatteringCoefficient:
    """Fit beta to a depth prior using a small-window, full-removal dark channel.

    The haze-retention factor and the guided refinement of the regular DCP
    transmission both bias the slope, so neither is used here; pixels whose
    transmission is near the floor carry no depth information and are dropped.
    """
    t = raw_transmission(hazy, A, omega=1.0, patch_radius=1)
    usable = DepthMap(depth_prior.values, depth_prior.mask & (t > 2 * t_floor))
    return estimate_beta(t, usable)


def refine_stage(hazy, depth: DepthMap, A, beta, cfg: CascadeConfig,
                 index: int = 1) -> StageEstimate:
    """One depth -> transmission -> depth pass."""
    hazy = as_rgb(hazy, "hazy")
    if depth.shape != hazy.shape[:2]:
        raise DimensionError(f"depth is {depth.shape}, hazy image is {hazy.shape[:2]}")
    guide = luminance(hazy)
    t_raw = transmission_from_depth(depth, beta)
    t = guided_filter(guide, t_raw, cfg.transmission_radius, cfg.transmission_eps)
    t = np.clip(t, cfg.t_floor, 1.0)
    d_next = depth_from_transmission(t, beta, cfg.t_floor).values
    d_next = guided_filter(guide, d_next, cfg.depth_radius, cfg.depth_eps)
    # smoothing may overshoot the representable range slightly
    d_max = -np.log(cfg.t_floor) / _beta(beta)
    d_next = DepthMap(np.clip(d_next, 0.0, d_max))
    residual = reconstruction_residual(dehaze_with(hazy, t, A, cfg.t_floor), t, A, hazy)
    return StageEstimate(index, d_next, t, residual)


def pdld_classical(hazy, cfg: CascadeConfig = CascadeConfig(),
                   external_depth: DepthMap | None = None) -> DehazeResult:
    """Progressive depth/transmission dehazing with ``cfg.stages`` stages."""
    hazy = as_rgb(hazy, "hazy")
    A = estimate_atmospheric_light(
        hazy, dark_channel(hazy, cfg.dcp.patch_radius), cfg.dcp.top_fraction
    )
    if cfg.beta is not None:
        beta = float(cfg.beta)
    elif external_depth is not None:
        beta = float(fit_beta(hazy, A, external_depth, cfg.t_floor))
    else:
        beta = DEFAULT_BETA
    depth = d0 = initial_depth(hazy, cfg, external_depth, A=A, beta=beta)
    t0 = np.clip(transmission_from_depth(d0, beta), cfg.t_floor, 1.0)
    r0 = reconstruction_residual(dehaze_with(hazy, t0, A, cfg.t_floor), t0, A, hazy)

    stages = []
    for k in range(1, cfg.stages + 1):
        stage = refine_stage(hazy, depth, A, beta, cfg, index=k)
        if stages and stage.residual > stages[-1].residual + 1e-4:
            log.info("stage %d residual rose from %.6g to %.6g",
                     k, stages[-1].residual, stage.residual)
        stages.append(stage)
        depth = stage.depth
    dehazed = dehaze_with(hazy, stages[-1].transmission, A, cfg.t_floor)
    return DehazeResult(dehazed, A, beta, tuple(stages), d0, r0)
