"""Design three kinds of symmetric banks, verify them and print their masks.

Run: python demos/design_and_verify.py
"""
from symwave.design import design_axial, design_group, design_point, verify_bank
from symwave.fileio import format_table
from symwave.lattice import fourfold_group

QUINCUNX = ((1, 1), (1, -1))

# A point-symmetric bank for a nonseparable dilation with |det M| = 3, order 4.
bank = design_point(((1, -2), (2, -1)), (0, 0), 4, selection="minimal")
print("point-a bank, |det M| = 3, order 4")
print(verify_bank(bank, 4).summary())
print("refinable mask:\n" + format_table(bank.masks[0]))

# Axial symmetry about a half-integer center for the dyadic dilation 2I.
bank = design_axial(((2, 0), (0, 2)), "semi-integer", 2)
print("\naxial bank, center", tuple(str(x) for x in bank.center))
print(verify_bank(bank, 2).summary())

# Full fourfold symmetry for the quincunx dilation.
bank = design_group(QUINCUNX, fourfold_group(), 2)
print("\nfourfold-symmetric quincunx bank")
print(verify_bank(bank, 2).summary())
for nu in range(1, bank.m + 1):
    if bank.duals[nu].is_zero:
        print(f"wavelet {nu}: paired with a zero dual, carries no detail")
        continue
    print(f"wavelet {nu}: vanishing moments {bank.meta[nu]['vanishing_moments']}, "
          f"dual wavelet {nu}: {bank.dual_meta[nu]['vanishing_moments']}")
