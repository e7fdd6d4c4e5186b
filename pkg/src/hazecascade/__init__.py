"""Single-image dehazing toolkit: scattering model, dark channel prior,
progressive depth/transmission refinement, losses, metrics and synthetic
RGB-D data."""

from .dcp import DcpConfig, dark_channel, dcp_dehaze, dcp_transmission, estimate_atmospheric_light
from .errors import ConfigError, DimensionError, DomainError, EstimationError, FormatError, HazeError
from .filters import box_filter, guided_filter, min_filter_fast, min_filter_naive
from .image import DepthMap, InverseDepthMap, clamp_unit, luminance, reciprocal, rgb_from_planes
from .metrics import DepthMetrics, band_abs_error, depth_metrics, psnr, ssim
from .progressive import CascadeConfig, DehazeResult, StageEstimate, pdld_classical, refine_stage
from .scattering import (
    AtmosphericLight,
    ScatteringCoefficient,
    dehaze_with,
    depth_from_transmission,
    hazify,
    reconstruction_residual,
    transmission_from_depth,
)

__version__ = "0.1.0"
