"""Exact and floating-point analysis/synthesis round trips on a small image.

Run: python demos/roundtrip.py
"""
import numpy as np

from symwave.design import design_group
from symwave.lattice import fourfold_group
from symwave.transform import Grid, analyze, grids_equal, max_abs_diff, synthesize

bank = design_group(((1, 1), (1, -1)), fourfold_group(), 2)
rng = np.random.default_rng(0)
img = rng.integers(0, 256, size=(12, 12))

pyr = analyze(img, bank, levels=3, exact=True)
print("levels:", pyr.levels, "approximation support:", pyr.approx.lo, "..", pyr.approx.hi)
rec = synthesize(pyr, bank)
print("exact round trip identical:", grids_equal(Grid(np.array(img, dtype=object), (0, 0)), rec))

x = img + 0.25 * rng.standard_normal(img.shape)
rec = synthesize(analyze(x, bank, levels=3, exact=False), bank)
print(f"float round trip max error: {max_abs_diff(Grid(x, (0, 0)), rec):.2e}")
