from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from symwave import verify as V
from symwave.design import bank_from_masks
from symwave.dualgen import build_dual_mask
from symwave.errors import ContextMismatch
from symwave.extension import build_extension, identity_defect, symmetrize_rows
from symwave.fileio import golden
from symwave.laurent import LaurentPoly
from symwave.lattice import build_context, pair_digits
from symwave.maskgen import MaskRecipe, build_point_mask
from symwave.polyphase import decompose
from strategies import DILATIONS_1D, DILATIONS_2D


def _match(bank, table):
    """``(role, index, scalar)`` for every bank mask equal to ``table`` up to a scalar."""
    out = []
    for role, polys in (("primal", bank.masks), ("dual", bank.duals)):
        for i, p in enumerate(polys):
            r = V.scalar_ratio(p, table)
            if r is not None:
                out.append((role, i, V.format_scalar(*r)))
    return out


def test_example1_duals_regenerated(ex1_bank):
    assert ex1_bank.duals[1].is_zero
    assert _match(ex1_bank, golden("ex1_dual_m1")) == [("dual", 2, "1")]
    assert _match(ex1_bank, golden("ex1_dual_m2")) == [("dual", 3, "-1")]
    assert [V.check_vanishing_moments(ex1_bank.duals[i]) for i in (2, 3)] == [4, 5]


def test_example1_primal_wavelets(ex1_bank):
    s1, s2 = LaurentPoly.monomial((0, -1), 2), LaurentPoly.monomial((0, 1), 2)
    # a sqrt(3) prefactor would be off by 3 relative to the reconstruction identity
    assert V.scalar_ratio(ex1_bank.masks[2], (s1 + s2).with_surd(3)) == (F(1, 3), 1)
    assert V.scalar_ratio(ex1_bank.masks[3], (s1 - s2).with_surd(3)) == (F(1, 3), 1)


def test_example2_octet(ex2_bank):
    pairs = {"ex2_m1": ("primal", 1), "ex2_m2": ("primal", 3), "ex2_m3": ("primal", 2), "ex2_m4": ("primal", 4),
             "ex2_dual_m1": ("dual", 1), "ex2_dual_m2": ("dual", 3), "ex2_dual_m3": ("dual", 2),
             "ex2_dual_m4": ("dual", 4)}
    for name, (role, i) in pairs.items():
        assert (role, i, "1") in _match(ex2_bank, golden(name)), name
    assert all(V.check_vanishing_moments(t) >= 2 for t in ex2_bank.duals[1:])


def test_example3(ex3_bank):
    assert _match(ex3_bank, golden("ex3_dual_m1")) == [("dual", 2, "1")]
    assert V.check_vanishing_moments(ex3_bank.duals[2]) == 2
    assert ex3_bank.masks[2] == LaurentPoly.monomial((1, 0), 2).div_sqrt(2)


@pytest.mark.parametrize("name", ["ex1_bank", "ex2_bank", "ex3_bank", "hat_bank"])
def test_banks_satisfy_identity(name, request):
    bank = request.getfixturevalue(name)
    assert bank.check_pr()
    P, Pt = bank.polyphase_matrices()
    assert len(P) == bank.m + 1


def _reconstruction_value(bank, xi):
    return sum(bank.masks[i](xi) * bank.duals[i](xi).conjugate() for i in range(bank.m + 1))


@pytest.mark.parametrize("name", ["ex1_bank", "ex2_bank", "ex3_bank"])
def test_reconstruction_identity_pointwise(name, request):
    bank = request.getfixturevalue(name)
    for xi in [(0.1, 0.2), (0.37, -0.41), (0.5, 0.25)]:
        assert abs(_reconstruction_value(bank, xi) - 1) < 1e-12


@settings(max_examples=15)
@given(st.sampled_from(DILATIONS_1D + DILATIONS_2D), st.integers(1, 3))
def test_extension_identity_and_row_symmetry(M, n):
    d = len(M)
    c = (0,) * d
    ctx, part = pair_digits(build_context(M, None, "minimal"), c)
    m0 = build_point_mask(MaskRecipe(ctx, part, n), "a")
    dual = build_dual_mask(m0, c, n, "auto")
    ext = build_extension(decompose(m0, ctx), decompose(dual, ctx))
    assert identity_defect(ext.N, ext.Nt) is None
    sym = symmetrize_rows(ext, ((tuple(tuple(int(i == j) for j in range(d)) for i in range(d))),
                                tuple(tuple(-int(i == j) for j in range(d)) for i in range(d))), c)
    assert identity_defect(sym.N, sym.Nt) is None
    bank = bank_from_masks(m0, dual, ctx, "point-a", c)
    for t in bank.masks[1:] + [u for u in bank.duals[1:] if not u.is_zero]:
        assert V.symmetry_descriptor(t, "point-a") is not None


def test_context_mismatch():
    a = build_context(((2, 0), (0, 2)))
    b = a.with_digits([(0, 0), (0, 1), (1, 0), (-1, -1)])
    t = LaurentPoly.const(1, 2)
    with pytest.raises(ContextMismatch):
        build_extension(decompose(t, a), decompose(t, b))


def test_fingerprint_stable(ex2_bank):
    assert ex2_bank.fingerprint() == ex2_bank.fingerprint()
    assert len(ex2_bank.fingerprint()) == 16
