"""Procedural RGB-D scenes, haze-parameter sampling, dataset synthesis and
PNG/CSV I/O."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ConfigError, FormatError
from .image import DepthMap, as_rgb
from .scattering import AtmosphericLight, ScatteringCoefficient, hazify, transmission_from_depth

A_RANGE = (0.7, 1.0)
BETA_RANGE = (0.5, 1.5)
DRAWS_PER_IMAGE = 3
MANIFEST_HEADER = ("clear", "depth", "hazy", "A", "beta", "seed")
PRIMITIVE_KINDS = ("plane", "box", "ramp")


@dataclass(frozen=True)
class HazeParams:
    A: float
    beta: float
    seed: int

    @property
    def light(self) -> AtmosphericLight:
        return AtmosphericLight.homogeneous(self.A)

    @property
    def scattering(self) -> ScatteringCoefficient:
        return ScatteringCoefficient(self.beta)


@dataclass(frozen=True)
class SceneSpec:
    width: int = 96
    height: int = 96
    depth_range: tuple = (1.0, 10.0)
    primitives: int = 6
    kinds: tuple = PRIMITIVE_KINDS
    freq_range: tuple = (2.0, 12.0)
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.depth_range
        if not 0 < lo < hi:
            raise ConfigError(f"depth_range must satisfy 0 < min < max, got {self.depth_range}")
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"scene size must be positive, got {self.width}x{self.height}")
        if self.primitives < 0:
            raise ConfigError("primitives must be >= 0")
        unknown = set(self.kinds) - set(PRIMITIVE_KINDS)
        if unknown or not self.kinds:
            raise ConfigError(f"unknown primitive kinds {sorted(unknown)}")
        f0, f1 = self.freq_range
        if not 0 < f0 <= f1:
            raise ConfigError(f"freq_range must satisfy 0 < lo <= hi, got {self.freq_range}")


@dataclass(frozen=True)
class ManifestEntry:
    clear_path: str
    depth_path: str
    hazy_path: str
    params: HazeParams = field(compare=True)

    def row(self) -> list:
        return [self.clear_path, self.depth_path, self.hazy_path,
                f"{self.params.A:.6g}", f"{self.params.beta:.6g}", str(self.params.seed)]


def _surface_colour(rng) -> np.ndarray:
    # saturated colour: one channel pushed low so natural-looking patches have
    # a dark channel near zero
    colour = rng.uniform(0.35, 1.0, 3)
    colour[rng.integers(3)] *= rng.uniform(0.0, 0.25)
    return colour


def _texture(rng, yy, xx, freq_range) -> np.ndarray:
    h, w = yy.shape
    pattern = np.zeros((h, w))
    for _ in range(3):
        f = rng.uniform(*freq_range) / max(h, w)
        theta = rng.uniform(0, np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        pattern += np.sin(2 * np.pi * f * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)
    pattern /= 3.0
    # shadow-like dark stripes
    pattern = np.where(pattern < -0.55, -1.0, pattern)
    return 0.55 + 0.45 * pattern


def gen_scene(spec: SceneSpec):
    """Textured scene with piecewise-smooth depth. Returns ``(rgb, DepthMap)``."""
    rng = np.random.default_rng(spec.seed)
    h, w = spec.height, spec.width
    lo, hi = spec.depth_range
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)

    # background: ground-like ramp, far at the top, near at the bottom
    v = 1.0 - yy / max(h - 1, 1)
    tilt = rng.uniform(-0.2, 0.2) * (xx / max(w - 1, 1) - 0.5)
    depth = lo + (hi - lo) * np.clip(v + tilt, 0.0, 1.0)
    rgb = _surface_colour(rng) * _texture(rng, yy, xx, spec.freq_range)[..., None]

    for _ in range(spec.primitives):
        kind = spec.kinds[rng.integers(len(spec.kinds))]
        rh = int(rng.integers(max(1, h // 6), max(2, h // 2)))
        rw = int(rng.integers(max(1, w // 6), max(2, w // 2)))
        y0 = int(rng.integers(0, max(1, h - rh)))
        x0 = int(rng.integers(0, max(1, w - rw)))
        sl = (slice(y0, y0 + rh), slice(x0, x0 + rw))
        d0 = rng.uniform(lo, hi)
        if kind == "box":
            region = np.full((rh, rw), d0)
        else:
            d1 = rng.uniform(lo, hi)
            if kind == "ramp":
                s = (yy[sl] - y0) / max(rh - 1, 1)
            else:
                gy, gx = rng.normal(size=2)
                s = (gy * (yy[sl] - y0) / max(rh, 1) + gx * (xx[sl] - x0) / max(rw, 1))
                s = (s - s.min()) / max(s.max() - s.min(), 1e-12)
            region = d0 + (d1 - d0) * s
        depth[sl] = region
        rgb[sl] = _surface_colour(rng) * _texture(rng, yy[sl], xx[sl], spec.freq_range)[..., None]

    rgb += rng.normal(0.0, 0.01, rgb.shape)
    return np.clip(rgb, 0.0, 1.0), DepthMap(np.clip(depth, lo, hi))


def sample_haze_params(seed: int, count_per_image: int = DRAWS_PER_IMAGE, index: int = 0):
    """Independent uniform draws of A and beta over the synthesis ranges.

    ``(seed, index)`` fully determines the result.
    """
    if count_per_image < 1:
        raise ConfigError(f"count_per_image must be >= 1, got {count_per_image}")
    rng = np.random.default_rng([int(seed), int(index)])
    A = rng.uniform(*A_RANGE, count_per_image)
    beta = rng.uniform(*BETA_RANGE, count_per_image)
    seeds = rng.integers(0, 2**63, count_per_image, dtype=np.int64)
    return [HazeParams(float(a), float(b), int(s)) for a, b, s in zip(A, beta, seeds)]


# ---------------------------------------------------------------- file I/O

def to_u8(img) -> np.ndarray:
    return np.round(np.clip(np.asarray(img), 0.0, 1.0) * 255.0).astype(np.uint8)


def write_rgb(path, img) -> None:
    Image.fromarray(to_u8(img)).save(path, format="PNG")


def write_plane_u8(path, plane) -> None:
    Image.fromarray(to_u8(plane)).save(path, format="PNG")


def write_depth(path, depth: DepthMap) -> None:
    """16-bit PNG in millimetres; invalid pixels (and depth < 0.5 mm) are 0."""
    mm = np.round(np.where(depth.mask, depth.values, 0.0) * 1000.0)
    if mm.max(initial=0) > 65535:
        raise FormatError(f"{path}: depth exceeds the 65.535 m range of 16-bit millimetres")
    Image.fromarray(mm.astype(np.uint16)).save(path, format="PNG")


def quantize_depth(depth: DepthMap) -> DepthMap:
    mm = np.round(np.where(depth.mask, depth.values, 0.0) * 1000.0)
    return DepthMap(mm / 1000.0, depth.mask & (mm > 0))


def read_rgb(path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode not in ("RGB", "RGBA") or np.asarray(im).dtype != np.uint8:
            raise FormatError(f"{path}: expected 8-bit RGB PNG, got mode {im.mode}")
        arr = np.asarray(im.convert("RGB"))
    return arr.astype(np.float64) / 255.0


def read_depth(path) -> DepthMap:
    with Image.open(path) as im:
        arr = np.asarray(im)
        if arr.ndim != 2 or arr.dtype not in (np.uint16, np.int32):
            raise FormatError(f"{path}: expected 16-bit grayscale PNG, got mode {im.mode}")
    if arr.min() < 0 or arr.max() > 65535:
        raise FormatError(f"{path}: values outside the 16-bit range")
    mm = arr.astype(np.float64)
    return DepthMap(mm / 1000.0, mm > 0)


def load_rgbd(clear_path, depth_path):
    rgb = read_rgb(clear_path)
    depth = read_depth(depth_path)
    if rgb.shape[:2] != depth.shape:
        raise FormatError(
            f"{clear_path} is {rgb.shape[1]}x{rgb.shape[0]} but "
            f"{depth_path} is {depth.shape[1]}x{depth.shape[0]}"
        )
    return rgb, depth


def write_manifest(path, entries) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MANIFEST_HEADER)
    for e in entries:
        writer.writerow(e.row())
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def read_manifest(path):
    base = Path(path).parent
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != MANIFEST_HEADER:
            raise FormatError(f"{path}: manifest header must be {','.join(MANIFEST_HEADER)}")
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(MANIFEST_HEADER):
                raise FormatError(f"{path}:{lineno}: expected 6 fields, got {len(row)}")
            try:
                params = HazeParams(float(row[3]), float(row[4]), int(row[5]))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
            entries.append(ManifestEntry(*(str(base / p) if not os.path.isabs(p) else p
                                           for p in row[:3]), params))
    return entries


def synthesize_dataset(pairs, count_per_image: int, seed: int, out_dir, prefix: str = ""):
    """Render ``count_per_image`` hazy versions of each (clear, depth) pair.

    Writes clear/depth/hazy PNGs and ``manifest.csv`` under ``out_dir``;
    manifest paths are relative to it. Returns the manifest entries.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (clear, depth) in enumerate(pairs):
        clear = as_rgb(clear, f"pair {i} clear")
        if clear.shape[:2] != depth.shape:
            raise FormatError(f"pair {i}: image and depth sizes differ")
        # render from what the files will hold so entries re-validate exactly
        clear = to_u8(clear) / 255.0
        depth = quantize_depth(depth)
        clear_name = f"{prefix}clear_{i:04d}.png"
        depth_name = f"{prefix}depth_{i:04d}.png"
        _write(write_rgb, out / clear_name, clear)
        _write(write_depth, out / depth_name, depth)
        for j, p in enumerate(sample_haze_params(seed, count_per_image, index=i)):
            hazy = hazify(clear, transmission_from_depth(depth, p.beta), p.light)
            hazy_name = f"{prefix}hazy_{i:04d}_{j:02d}.png"
            _write(write_rgb, out / hazy_name, hazy)
            entries.append(ManifestEntry(clear_name, depth_name, hazy_name, p))
    write_manifest(out / "manifest.csv", entries)
    return entries


def _write(fn, path, data):
    try:
        fn(path, data)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def verify_entry(entry: ManifestEntry, tol: float = 1.0 / 255.0 + 1e-9) -> float:
    """Re-render the hazy image from clear + depth + params.

    Returns the max abs difference to the stored hazy file; raises
    ``FormatError`` when it exceeds ``tol``.
    """
    clear, depth = load_rgbd(entry.clear_path, entry.depth_path)
    hazy = read_rgb(entry.hazy_path)
    expect = hazify(clear, transmission_from_depth(depth, entry.params.beta), entry.params.light)
    err = float(np.abs(expect - hazy).max())
    if err > tol:
        raise FormatError(f"{entry.hazy_path}: re-rendered haze differs by {err:.4g}")
    return err


# ---------------------------------------------------------- bundled suites

SUITE_SIZE = 128
SUITE_DEPTH_RANGE = (0.5, 2.5)
FAR_DEPTH_RANGE = (1.0, 30.0)
FAR_BETA = 0.08


@dataclass(frozen=True)
class HazyScene:
    clear: np.ndarray
    depth: DepthMap
    params: HazeParams
    transmission: np.ndarray
    hazy: np.ndarray


def _render(clear, depth, params) -> HazyScene:
    t = transmission_from_depth(depth, params.beta)
    return HazyScene(clear, depth, params, t, hazify(clear, t, params.light))


def procedural_suite(n: int = 20, seed: int = 2024, size: int = SUITE_SIZE,
                     depth_range=SUITE_DEPTH_RANGE):
    """Deterministic hazy scenes with haze drawn from the synthesis ranges.

    The default depth range keeps most transmissions above the inversion
    floor, so the scenes are recoverable in principle.
    """
    scenes = []
    for i in range(n):
        clear, depth = gen_scene(SceneSpec(size, size, depth_range, seed=seed * 1000 + i))
        scenes.append(_render(clear, depth, sample_haze_params(seed, 1, index=i)[0]))
    return scenes


def far_suite(n: int = 10, seed: int = 4048, size: int = SUITE_SIZE, beta: float = FAR_BETA):
    """Deep (up to 30 m) scenes in light haze, for distance-banded depth errors.

    beta is fixed low so that distant pixels stay above the transmission floor.
    """
    scenes = []
    for i in range(n):
        clear, depth = gen_scene(SceneSpec(size, size, FAR_DEPTH_RANGE, seed=seed * 1000 + i))
        A = sample_haze_params(seed, 1, index=i)[0].A
        scenes.append(_render(clear, depth, HazeParams(A, beta, seed * 1000 + i)))
    return scenes
