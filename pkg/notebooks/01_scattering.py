"""
Haze as a convex blend
======================

A pixel seen through fog is a mix of the surface colour J and the airlight A.
The mixing weight is the transmission t = exp(-beta * d).
"""
# %%
import numpy as np

from hazecascade import AtmosphericLight, DepthMap, dehaze_with, hazify, transmission_from_depth

# a tiny 1x3 "image": one grey surface at three distances
J = np.full((1, 3, 3), 0.2)
depth = DepthMap(np.array([[0.5, 2.0, 8.0]]))
A = AtmosphericLight.homogeneous(0.9)

t = transmission_from_depth(depth, beta=1.0)
print("transmission:", np.round(t, 4))

# %%
# Far pixels lose almost all their own colour and drift toward A.
I = hazify(J, t, A)
print("hazy red channel:", np.round(I[..., 0], 4))

# %%
# Inverting needs t. Below t_floor (0.05 by default) the division is capped,
# which is why the 8 m pixel comes back wrong.
print("recovered (default floor):", np.round(dehaze_with(I, t, A)[..., 0], 4))
print("recovered (floor 1e-6):  ", np.round(dehaze_with(I, t, A, t_floor=1e-6)[..., 0], 4))

# %%
# 8-bit storage adds up to half a grey level of error, and dividing by t
# multiplies it. At t = 0.05 that is already ~10 grey levels.
I8 = np.round(I * 255) / 255
err = np.abs(dehaze_with(I8, t, A, t_floor=1e-6) - J)[..., 0]
print("error after 8-bit rounding:", np.round(err, 4))
