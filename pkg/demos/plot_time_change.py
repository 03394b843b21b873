"""
Reparametrising time
====================

Replacing t by an increasing τ(t) and scaling the vector field by τ'(t)
gives the family φ_{τ(s),τ(t)}.  An exponentially saturating τ squeezes an
infinite time axis into the finite life of a degenerating annulus.
"""

import numpy as np

from annloewner import (ExpSaturatingTimeChange, LinearTimeChange, SolverConfig, evolve_points,
                        presets, reparametrize)

cfg = SolverConfig()
data = presets.get_preset("mixed_rotation")
z = np.array([0.6, -0.4 + 0.5j])

# %%
# Doubling the clock
# ------------------
fast = reparametrize(data, LinearTimeChange(2.0))
print(np.abs(evolve_points(fast, cfg, 0.0, 0.4, z) - evolve_points(data, cfg, 0.0, 0.8, z)))

# %%
# Saturating clock
# ----------------
# The annulus degenerates at T = 1; τ(t) = 1 - e^{-t} never reaches it.
tau = ExpSaturatingTimeChange(1.0)
slow = reparametrize(data, tau)
for t in (0.5, 2.0):
    diff = evolve_points(slow, cfg, 0.0, t, z) - evolve_points(data, cfg, 0.0, tau(t), z)
    print(f"t = {t}: max |φ* - φ∘τ| = {np.max(np.abs(diff)):.2e}")
