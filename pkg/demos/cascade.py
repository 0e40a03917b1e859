"""Evaluate a refinable function by subdivision and print a coarse slice of it.

Run: python demos/cascade.py
"""
import numpy as np

from symwave.fileio import golden
from symwave.lattice import build_context
from symwave.transform import cascade, integer_values

M = ((1, 1), (1, -1))
m0 = golden("ex3_m0")
ctx = build_context(M)

print("values at integer points:")
v = integer_values(m0, ctx)
for k, val in zip(v.points().reshape(-1, 2), v.data.reshape(-1)):
    if abs(val) > 1e-12:
        print(" ", tuple(int(i) for i in k), f"{float(val):.6f}")

cg = cascade(m0, ctx, 8)
print("level", cg.level, "grid shape", cg.grid.data.shape, "mass", f"{cg.mass():.12f}")
pts = cg.coordinates()
near_axis = (np.abs(pts[..., 1]) < 1e-9) & (np.abs(pts[..., 0]) <= 2)
order = np.argsort(pts[..., 0][near_axis])
xs, vals = pts[..., 0][near_axis][order], np.real(cg.grid.data[near_axis][order])
for x, val in list(zip(xs, vals))[::4]:
    print(f"  phi({x:+.4f}, 0) = {val:+.4f}")
