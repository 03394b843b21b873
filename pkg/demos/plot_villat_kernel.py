"""
The Villat kernel on an annulus
===============================

The Villat kernel plays the role of the Schwarz kernel on the annulus
``r < |z| < 1``.  Here we evaluate it, watch it collapse onto the disk kernel
as ``r`` shrinks, and recover a holomorphic function from its boundary real parts.
"""

import numpy as np

from annloewner import CircleMeasure, herglotz_eval, villat_eval, villat_reconstruct

# %%
# At r = 0 the kernel is exactly the Schwarz kernel (1 + z)/(1 - z).
z = 0.4 + 0.3j
print("r = 0    :", villat_eval(0.0, z), "vs", (1 + z) / (1 - z))

# As r grows the annulus narrows and the kernel picks up the inner circle.
for r in (1e-4, 0.05, 0.2, 0.4):
    print(f"r = {r:<6g}:", villat_eval(r, z))

# %%
# Real part on the circles
# ------------------------
# Approaching the outer circle away from z = 1 the real part tends to 0.
# Near the inner circle it flattens out to a constant.
r = 0.3
theta = np.linspace(0.2, 2 * np.pi - 0.2, 7)
print("Re K on |z| = 1:", np.round(villat_eval(r, 0.999999 * np.exp(1j * theta)).real, 4))
print("Re K on |z| = r:", np.round(villat_eval(r, 1.02 * r * np.exp(1j * theta)).real, 4))

# %%
# Herglotz functions
# ------------------
# A pair of circle measures defines a function with positive real part data on
# the outer circle.  The total mass is 1 and uniform parts are handled analytically.
mu1 = CircleMeasure(((0.0, 0.4),), 0.4)
mu2 = CircleMeasure(((np.pi, 0.2),), 0.0)
print("p(z) =", herglotz_eval(r, mu1, mu2, 0.6j))

# %%
# Reconstruction from boundary data
# ---------------------------------
# f(z) = z + 0.2/z is holomorphic on the annulus.  Feed the real part of f on
# both circles plus the mean of Im f on the outer circle and compare.
f = lambda w: w + 0.2 / w
n = 256
phi = 2 * np.pi * np.arange(n) / n
outer = f(np.exp(1j * phi)).real
inner = f(r * np.exp(1j * phi)).real
pts = np.array([0.5, 0.45j, -0.7 + 0.1j])
g = villat_reconstruct(r, outer, inner, 0.0, pts)
print("reconstruction error:", np.max(np.abs(g - f(pts))))
