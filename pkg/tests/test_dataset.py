import hashlib

import numpy as np
import pytest
from PIL import Image

from hazecascade.dataset import (
    MANIFEST_HEADER,
    HazeParams,
    SceneSpec,
    gen_scene,
    load_rgbd,
    read_depth,
    read_manifest,
    sample_haze_params,
    synthesize_dataset,
    verify_entry,
    write_depth,
    write_rgb,
)
from hazecascade.errors import ConfigError, FormatError
from hazecascade.image import DepthMap


def test_gen_scene_deterministic_and_in_range():
    spec = SceneSpec(64, 48, (1.0, 10.0), seed=9)
    a, da = gen_scene(spec)
    b, db = gen_scene(spec)
    assert a.tobytes() == b.tobytes() and da.values.tobytes() == db.values.tobytes()
    assert a.shape == (48, 64, 3) and da.shape == (48, 64)
    assert 1.0 <= da.values.min() and da.values.max() <= 10.0


def test_gen_scene_is_textured():
    for seed in range(20):
        rgb, _ = gen_scene(SceneSpec(96, 96, seed=seed))
        assert rgb.reshape(-1, 3).std(axis=0).min() > 0.05


def test_gen_scene_rejects_bad_range():
    with pytest.raises(ConfigError):
        SceneSpec(depth_range=(3.0, 3.0))
    with pytest.raises(ConfigError):
        SceneSpec(depth_range=(0.0, 3.0))


def test_sample_haze_params_protocol():
    draws = sample_haze_params(7)
    assert len(draws) == 3
    assert draws == sample_haze_params(7)
    assert draws != sample_haze_params(7, index=1)
    many = sample_haze_params(1, 10_000)
    A = np.array([p.A for p in many])
    beta = np.array([p.beta for p in many])
    assert A.min() >= 0.7 and A.max() <= 1.0
    assert beta.min() >= 0.5 and beta.max() <= 1.5
    with pytest.raises(ConfigError):
        sample_haze_params(1, 0)


def test_sample_haze_params_means():
    many = sample_haze_params(3, 100_000)
    assert np.mean([p.A for p in many]) == pytest.approx(0.85, abs=0.01)
    assert np.mean([p.beta for p in many]) == pytest.approx(1.0, abs=0.02)


def _pairs(n=2, size=48):
    return [gen_scene(SceneSpec(size, size, (0.5, 2.5), seed=s)) for s in range(n)]


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_synthesize_dataset_cardinality_and_determinism(tmp_path):
    pairs = _pairs()
    first = synthesize_dataset(pairs, 3, seed=5, out_dir=tmp_path / "a")
    second = synthesize_dataset(pairs, 3, seed=5, out_dir=tmp_path / "b")
    assert len(first) == 6 and first == second
    for e in first:
        assert _digest(tmp_path / "a" / e.hazy_path) == _digest(tmp_path / "b" / e.hazy_path)
    assert _digest(tmp_path / "a/manifest.csv") == _digest(tmp_path / "b/manifest.csv")


def test_manifest_schema(tmp_path):
    synthesize_dataset(_pairs(1), 2, seed=1, out_dir=tmp_path)
    raw = (tmp_path / "manifest.csv").read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == ",".join(MANIFEST_HEADER)
    fields = lines[1].split(",")
    assert fields[0] == "clear_0000.png" and fields[2] == "hazy_0000_00.png"
    assert len(fields[3].replace(".", "").lstrip("0")) <= 6
    entries = read_manifest(tmp_path / "manifest.csv")
    assert len(entries) == 2 and isinstance(entries[0].params, HazeParams)


def test_manifest_entries_self_validate(tmp_path):
    synthesize_dataset(_pairs(), 3, seed=2, out_dir=tmp_path)
    for e in read_manifest(tmp_path / "manifest.csv"):
        assert verify_entry(e) <= 1 / 255


def test_verify_entry_detects_tampering(tmp_path):
    synthesize_dataset(_pairs(1), 1, seed=2, out_dir=tmp_path)
    entry = read_manifest(tmp_path / "manifest.csv")[0]
    write_rgb(entry.hazy_path, np.zeros((48, 48, 3)))
    with pytest.raises(FormatError):
        verify_entry(entry)


def test_load_rgbd_units_and_mask(tmp_path):
    mm = np.array([[1500, 0], [65535, 1]], dtype=np.uint16)
    Image.fromarray(mm).save(tmp_path / "d.png")
    write_rgb(tmp_path / "c.png", np.full((2, 2, 3), 0.5))
    rgb, depth = load_rgbd(tmp_path / "c.png", tmp_path / "d.png")
    assert depth.values[0, 0] == pytest.approx(1.5) and depth.mask[0, 0]
    assert not depth.mask[0, 1]
    assert rgb[0, 0, 0] == pytest.approx(128 / 255)


def test_io_roundtrip_precision(tmp_path, rng):
    rgb = rng.random((20, 30, 3))
    depth = DepthMap(rng.uniform(0.2, 60.0, (20, 30)))
    write_rgb(tmp_path / "c.png", rgb)
    write_depth(tmp_path / "d.png", depth)
    rgb2, depth2 = load_rgbd(tmp_path / "c.png", tmp_path / "d.png")
    assert np.abs(rgb2 - rgb).max() <= 1 / 255
    assert np.abs(depth2.values - depth.values).max() <= 0.001


def test_load_rgbd_format_errors(tmp_path):
    Image.fromarray(np.zeros((4, 4), np.uint8)).save(tmp_path / "d8.png")
    write_rgb(tmp_path / "c.png", np.zeros((4, 4, 3)))
    with pytest.raises(FormatError, match="16-bit"):
        read_depth(tmp_path / "d8.png")
    Image.fromarray(np.ones((5, 4), np.uint16)).save(tmp_path / "d.png")
    with pytest.raises(FormatError, match="4x5"):
        load_rgbd(tmp_path / "c.png", tmp_path / "d.png")
    with pytest.raises(FormatError, match="RGB"):
        load_rgbd(tmp_path / "d.png", tmp_path / "d.png")


def test_synthesize_reports_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        synthesize_dataset(_pairs(1), 1, seed=0, out_dir=blocker / "sub")
