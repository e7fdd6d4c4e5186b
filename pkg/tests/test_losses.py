import numpy as np
import pytest

from hazecascade.errors import ConfigError, DimensionError, DomainError
from hazecascade.image import InverseDepthMap
from hazecascade.losses import (
    LossWeights,
    l_combined,
    l_depth,
    l_grad,
    l_ssim_loss,
    total_objective,
)
from hazecascade.metrics import SSIM_C1

H = 1e-4


def inv(values, mask=None):
    return InverseDepthMap(values, mask)


def central_differences(fn, pred, gt):
    grad = np.zeros_like(pred)
    for idx in np.ndindex(pred.shape):
        up, down = pred.copy(), pred.copy()
        up[idx] += H
        down[idx] -= H
        grad[idx] = (fn(inv(up), gt)[0] - fn(inv(down), gt)[0]) / (2 * H)
    return grad


def random_pair(seed, shape=(16, 16)):
    g = np.random.default_rng(seed)
    gt = g.uniform(0.05, 2.0, shape)
    pred = gt + g.normal(0, 0.3, shape)
    return np.abs(pred) + 0.01, gt


def test_l_depth_simple_cases():
    gt = inv(np.full((4, 5), 0.5))
    loss, grad = l_depth(gt, gt)
    assert loss == 0 and not grad.any()
    loss, grad = l_depth(inv(np.full((4, 5), 0.6)), gt)
    assert loss == pytest.approx(0.1)
    np.testing.assert_allclose(grad, 1 / 20)


def test_l_depth_masked():
    mask = np.ones((3, 3), bool)
    mask[0, 0] = False
    pred = np.full((3, 3), 1.0)
    pred[0, 0] = 100.0
    loss, grad = l_depth(inv(pred, mask), inv(np.full((3, 3), 0.5), mask))
    assert loss == pytest.approx(0.5)
    assert grad[0, 0] == 0
    with pytest.raises(DomainError):
        l_depth(inv(pred, np.zeros((3, 3), bool)), inv(pred))


def test_l_grad_zero_cases(rng):
    gt = inv(rng.uniform(0.1, 1.0, (8, 8)))
    assert l_grad(gt, gt)[0] == 0
    assert l_grad(inv(gt.values + 0.3), gt)[0] == pytest.approx(0.0, abs=1e-12)


def test_l_grad_forward_difference_definition():
    e = np.array([[0.0, 1.0, 3.0], [2.0, 2.0, 2.0]])
    loss, _ = l_grad(inv(e + 1.0), inv(np.ones((2, 3))))
    # |1|+|2| horizontal, |2|+|1|+|1| vertical, over 6 pixels
    assert loss == pytest.approx(7 / 6)


def _kink_free(pred, gt, which):
    # pixels whose finite-difference stencil does not cross a |x| kink
    e = pred - gt
    safe = np.ones(pred.shape, bool)
    if which == "depth":
        return np.abs(e) > 2 * H
    gh = np.abs(np.diff(e, axis=1)) > 2 * H
    gv = np.abs(np.diff(e, axis=0)) > 2 * H
    safe[:, :-1] &= gh
    safe[:, 1:] &= gh
    safe[:-1, :] &= gv
    safe[1:, :] &= gv
    return safe


@pytest.mark.parametrize("fn, which", [(l_depth, "depth"), (l_grad, "grad")])
def test_gradients_match_finite_differences(fn, which):
    for seed in range(50):
        pred, gt = random_pair(seed)
        _, grad = fn(inv(pred), inv(gt))
        fd = central_differences(fn, pred, inv(gt))
        ok = _kink_free(pred, gt, which)
        assert ok.mean() > 0.9
        np.testing.assert_allclose(grad[ok], fd[ok], rtol=1e-3, atol=1e-10)


def test_ssim_loss_cases(rng):
    a = inv(rng.uniform(0.1, 1.0, (16, 16)))
    b = inv(rng.uniform(0.1, 1.0, (16, 16)))
    assert l_ssim_loss(a, a) == pytest.approx(0.0, abs=1e-9)
    assert l_ssim_loss(a, b) == l_ssim_loss(b, a)
    lo, hi = inv(np.full((16, 16), 0.2)), inv(np.full((16, 16), 0.9))
    expected = 0.5 * (1 - SSIM_C1 / (1 + SSIM_C1))
    assert l_ssim_loss(lo, hi) == pytest.approx(expected, rel=1e-9)
    assert expected == pytest.approx(0.49995, abs=1e-6)
    assert 0 <= l_ssim_loss(a, b) <= 1


def test_combined_term_sum(rng):
    gt = inv(rng.uniform(0.1, 1.0, (16, 16)))
    assert l_combined(gt, gt, LossWeights(3.0)) == pytest.approx(0.0, abs=1e-9)
    pred = inv(rng.uniform(0.1, 1.0, (16, 16)))
    assert l_combined(pred, gt, LossWeights(0.0)) == pytest.approx(
        l_grad(pred, gt)[0] + l_ssim_loss(pred, gt), abs=1e-15)
    shifted = inv(gt.values + 0.2)
    value = l_combined(shifted, gt, LossWeights(0.1))
    assert value == pytest.approx(0.1 * 0.2 + 0.0 + l_ssim_loss(shifted, gt), abs=1e-12)
    values = [l_combined(pred, gt, LossWeights(lam)) for lam in (0.0, 0.1, 1.0, 5.0)]
    assert all(x < y for x, y in zip(values, values[1:]))
    with pytest.raises(ConfigError):
        LossWeights(-1.0)


def test_total_objective():
    assert total_objective([0.0], [0.0], 0.0, 0.0).total == 0
    out = total_objective([0.5], [0.25], 0.1, 0.05)
    assert out.total == pytest.approx(0.9, abs=1e-15)
    a = total_objective([0.3, 0.11], [0.7, 0.013], 0.2, 0.04).total
    b = total_objective([0.11, 0.3], [0.013, 0.7], 0.2, 0.04).total
    assert a == b
    na = total_objective([0.3], [0.2])
    assert na.atmosphere is None and na.total == pytest.approx(0.5)
    with pytest.raises(DimensionError):
        total_objective([0.1, 0.2], [0.1])
