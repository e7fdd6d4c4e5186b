import numpy as np
import pytest

from hazecascade.errors import DimensionError, DomainError
from hazecascade.image import (
    DepthMap,
    InverseDepthMap,
    as_rgb,
    clamp_unit,
    reciprocal,
    rgb_from_planes,
)


def test_reciprocal_constant():
    out = reciprocal(DepthMap(np.full((4, 5), 2.0)))
    assert isinstance(out, InverseDepthMap)
    np.testing.assert_array_equal(out.values, 0.5)
    np.testing.assert_array_equal(reciprocal(DepthMap(np.ones((3, 3)))).values, 1.0)


def test_reciprocal_involution(rng):
    d = DepthMap(rng.uniform(0.1, 80.0, (16, 16)))
    back = reciprocal(reciprocal(d))
    assert type(back) is DepthMap
    np.testing.assert_allclose(back.values, d.values, rtol=1e-6)


def test_reciprocal_keeps_mask_and_skips_invalid():
    vals = np.array([[1.0, 0.0], [4.0, 2.0]])
    mask = vals > 0
    out = reciprocal(DepthMap(vals, mask))
    np.testing.assert_array_equal(out.mask, mask)
    assert out.values[0, 0] == 1.0 and out.values[1, 0] == 0.25


def test_reciprocal_rejects_zero_and_names_pixel():
    vals = np.ones((3, 3))
    vals[1, 2] = 0.0
    with pytest.raises(DomainError, match="index 5"):
        reciprocal(DepthMap(vals))


@pytest.mark.parametrize("value, expected", [(1.3, 1.0), (-0.2, 0.0), (0.5, 0.5)])
def test_clamp_unit(value, expected):
    assert clamp_unit(np.full((2, 2, 3), value))[0, 0, 0] == expected


def test_clamp_unit_rejects_nan():
    img = np.zeros((2, 2, 3))
    img[1, 1, 1] = np.nan
    with pytest.raises(DomainError):
        clamp_unit(img)


def test_mismatched_planes_rejected():
    with pytest.raises(DimensionError):
        rgb_from_planes(np.zeros((4, 4)), np.zeros((4, 4)), np.zeros((4, 5)))
    with pytest.raises(DimensionError):
        DepthMap(np.ones((4, 4)), np.ones((4, 3), bool))


def test_rgb_range_enforced():
    with pytest.raises(DomainError):
        as_rgb(np.full((2, 2, 3), 1.5))
    with pytest.raises(DomainError):
        as_rgb(np.full((2, 2, 3), np.inf))


def test_depth_map_is_immutable():
    d = DepthMap(np.ones((2, 2)))
    with pytest.raises(ValueError):
        d.values[0, 0] = 3.0
