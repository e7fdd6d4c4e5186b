"""
Scoring images and depth maps
=============================
"""
# %%
import numpy as np

from hazecascade import DepthMap, band_abs_error, depth_metrics, psnr, ssim

rng = np.random.default_rng(1)
x = rng.random((64, 64))

print(psnr(x, x))                    # capped, not inf
print(round(psnr(x, np.clip(x + 0.1, 0, 1)), 2))
print(round(ssim(x, x)[0], 12))

# %%
# Depth predicted 10% too far everywhere: every ratio is 1.1 < 1.25.
gt = DepthMap(rng.uniform(1, 30, (64, 64)))
m = depth_metrics(DepthMap(gt.values * 1.1), gt)
for k, v in m.as_dict().items():
    print(f"{k:7s} {v:.4f}")

# %%
# Errors by distance band (d-2, d]: a constant relative error grows with range.
for b in band_abs_error(DepthMap(gt.values * 1.1), gt, 2.0, 30.0)[::3]:
    print(f"up to {b.upper:4.0f} m: {b.mean_abs_error:.3f} m over {b.count} px")
