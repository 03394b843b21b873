"""
Conformal type of the Loewner range
===================================

Two integrals of log r(t), weighted by the outer and inner measure masses,
decide whether the union of the ranges fills the disk, the punctured disk,
an annulus, or the whole punctured plane.  A trajectory probe checks the
verdict independently.
"""

from annloewner import classify_type, presets

# %%
# Four non-degenerate families
# ----------------------------
cases = {
    "scaling": presets.scaling(),
    "rotation": presets.rotation(),
    "split 1/2": presets.split(0.5),
    "exp_approach": presets.exp_approach(),
}
for name, data in cases.items():
    rep = classify_type(data)
    print(f"{name:<13}", rep.verdict_line())

# %%
# Degenerate annuli
# -----------------
# When r vanishes identically only the α-weighted integral matters.
for name in ("degenerate_radial", "degenerate_decay"):
    rep = classify_type(presets.get_preset(name))
    print(f"{name:<18} I = {rep.I.value:.4g}  ->", rep.verdict_line())

# %%
# Integrals in detail
# -------------------
rep = classify_type(presets.exp_approach())
print(rep.I1.to_dict())
print(rep.I2.to_dict())
