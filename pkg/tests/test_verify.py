import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from symwave import verify as V
from symwave.design import design_point
from symwave.fileio import golden
from symwave.laurent import GaussianRational, LaurentPoly
from symwave.lattice import build_context, fourfold_group
import oracles
from strategies import DILATIONS_1D, DILATIONS_2D, polys

M1 = ((1, -2), (2, -1))


def _normalize(t: LaurentPoly) -> LaurentPoly:
    s = t.core_moment((0,) * t.dim)
    if s == 0:
        t = t + LaurentPoly.const(1, t.dim)
        s = t.core_moment((0,) * t.dim)
    return t.scale(1 / s)


@settings(max_examples=25)
@given(st.sampled_from(DILATIONS_2D), polys(dim=2, complex_=False, radius=2))
def test_sum_rule_matches_cyclotomic_oracle_random(M, t):
    t = _normalize(t)
    ctx = build_context(M)
    assert V.check_sum_rule_order(t, ctx, 6) == min(oracles.sum_rule_order(t.coeffs, M, 6), 6)


def _factor_mask(M, powers):
    """Products of ``(1 + e(s . xi) + ...)/m`` coset sums raise the sum-rule order."""
    ctx = build_context(M)
    box = LaurentPoly({s: F(1, ctx.m) for s in ctx.digits}, dim=ctx.dim)
    out = LaurentPoly.const(1, ctx.dim)
    for _ in range(powers):
        out = out * box
    return out, ctx


@pytest.mark.parametrize("M", DILATIONS_1D[:3] + DILATIONS_2D[:4])
@pytest.mark.parametrize("p", [1, 2, 3])
def test_sum_rule_of_box_products(M, p):
    t, ctx = _factor_mask(M, p)
    got = V.check_sum_rule_order(t, ctx)
    assert got == oracles.sum_rule_order(t.coeffs, M)
    assert got >= p


@pytest.mark.parametrize("sense", ["a", "b"])
def test_complex_masks_against_oracle(sense):
    rng = random.Random(3)
    for _ in range(3):
        M = rng.choice(DILATIONS_1D[:2] + DILATIONS_2D[:3])
        d = len(M)
        lam = None
        if sense == "b":
            lam = {(0,) * d: 1, tuple(int(i == 0) for i in range(d)): GaussianRational(0, F(1, 3))}
        b = design_point(M, (0,) * d, 2, sense, lambda_prime=lam)
        assert V.check_sum_rule_order(b.masks[0], b.ctx) == oracles.sum_rule_order(b.masks[0].coeffs, M)


def test_golden_properties():
    m0 = golden("ex1_m0")
    ctx = build_context(M1)
    assert V.check_sum_rule_order(m0, ctx) == 4
    assert V.check_symmetry(m0, V.SymmetrySpec("point-a", (0, 0))).holds
    assert m0.core_moment((0, 0)) == 1
    assert oracles.is_point_symmetric(m0.coeffs, (0, 0))
    e2 = golden("ex2_m0")
    assert V.check_symmetry(e2, V.SymmetrySpec("axial", (F(1, 2), F(1, 2)))).holds
    assert [c for c, _ in V.detect_symmetry(e2, "axial")] == [(F(1, 2), F(1, 2))]
    assert V.check_duality(e2, golden("ex2_dual_m0"), 2)
    e3 = golden("ex3_m0")
    assert V.check_symmetry(e3, V.SymmetrySpec("group", (0, 0), fourfold_group())).holds
    assert V.check_vanishing_moments(golden("ex3_dual_m1")) == 2


def test_negative_control_has_witness():
    m0 = golden("ex1_m0")
    bad = m0 + LaurentPoly({(1, 3): F(1, 243)})
    rec = V.check_symmetry(bad, V.SymmetrySpec("point-a", (0, 0)))
    assert not rec.holds and rec.witness is not None
    assert V.check_sum_rule_order(bad, build_context(M1)) < 4


@given(polys(dim=2, complex_=False))
def test_vanishing_moments_match_oracle(t):
    assume(not t.is_zero)
    assert V.check_vanishing_moments(t, 5) == oracles.vanishing_moment_order(t.coeffs, 5)


@given(polys(dim=2), st.sampled_from([2, 3, 5]), st.integers(1, 9))
def test_scalar_ratio_recovers_scale(t, r, q):
    assume(not t.is_zero)
    s = t.scale(F(q, 7)).with_surd(r)
    got = V.scalar_ratio(s, t)
    assert got is not None
    assert s == t.scale(got[0]).with_surd(got[1])


def test_duality_and_linear_phase():
    hat = LaurentPoly({(-1,): F(1, 4), (0,): F(1, 2), (1,): F(1, 4)})
    one = LaurentPoly.const(1, 1)
    assert V.check_duality(hat, one, 2)
    assert not V.check_duality(hat, one, 3)
    haar = LaurentPoly({(0,): F(1, 2), (1,): F(1, 2)})
    assert V.check_linear_phase_moments(haar, 2) == (True, (F(1, 2),))
    ok, c = V.check_linear_phase_moments(haar, 3)
    assert not ok and c == (F(1, 2),)
    assert V.check_refinable_symmetry_center(build_context(2), [1]) == (F(1),)
