"""Measure the decay of the quasi-interpolation error against the predicted rate.

Run: python demos/approximation.py
"""
from fractions import Fraction

import numpy as np

from symwave.design import bank_from_masks
from symwave.fileio import golden
from symwave.lattice import build_context, pair_digits
from symwave.laurent import LaurentPoly
from symwave.transform import approx_order_experiment

hat = LaurentPoly({(-1,): Fraction(1, 4), (0,): Fraction(1, 2), (1,): Fraction(1, 4)})
ctx, _ = pair_digits(build_context([[2]]), (0,))
bank = bank_from_masks(hat, LaurentPoly.const(1, 1), ctx, "point-a", (0,))
res = approx_order_experiment(bank, lambda x: np.sin(2 * np.pi * x[..., 0]), [1, 2, 3, 4, 5], 2)
print("hat, sin(2 pi x)")
for j, e, r in zip(res.levels, res.errors, [None] + list(res.ratios)):
    print(f"  level {j}: error {e:.3e}" + (f"  ratio {r:.3f}" if r else ""))
print(f"  slope {res.slope:.4f}, predicted {res.expected:.4f}, deviation {res.rel_error():.1%}")

ctx, _ = pair_digits(build_context(((1, -2), (2, -1)), None, "minimal"), (0, 0))
bank = bank_from_masks(golden("ex1_m0"), LaurentPoly.const(1, 2), ctx, "point-a", (0, 0))
res = approx_order_experiment(bank, lambda x: np.exp(-np.sum(x ** 2, axis=-1)), [1, 2, 3, 4], 4)
print("order-4 mask, |det M| = 3, Gaussian bump")
print(f"  errors {[f'{e:.2e}' for e in res.errors]}")
print(f"  slope {res.slope:.4f}, predicted {res.expected:.4f}, deviation {res.rel_error():.1%}")
