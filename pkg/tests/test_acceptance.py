"""Acceptance suite: one PASS/FAIL line per criterion with pinned tolerances and timings.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed in the terminal
summary (and by ``python tests/test_acceptance.py``).
"""
import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, M1, M2, M3, ex1_bank_build, ex2_bank_build, ex3_bank_build, hat_bank_build  # noqa: E402
from symwave import verify as V  # noqa: E402
from symwave.design import symmetry_elements, verify_bank  # noqa: E402
from symwave.extension import build_extension, extract_filterbank, identity_defect, symmetrize_rows  # noqa: E402
from symwave.fileio import golden  # noqa: E402
from symwave.laurent import LaurentPoly  # noqa: E402
from symwave.lattice import build_context, fourfold_group, pair_digits  # noqa: E402
from symwave.polyphase import decompose  # noqa: E402
from symwave.theta import univariate_theta  # noqa: E402
from symwave.transform import Grid, analyze, approx_order_experiment, grids_equal, max_abs_diff, synthesize  # noqa: E402
import oracles  # noqa: E402
from recipes import BUILDERS  # noqa: E402

# pinned limits
LIMIT_S = {1: 1.0, 2: 5.0, 3: 5.0, 4: 2.0, 5: 60.0, 6: 10.0, 7: 30.0, 8: 120.0}
FLOAT_PR_TOL = 1e-12
SLOPE_TOL = {"hat": 0.15, "ex1": 0.20}


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.checks = []
        self.t0 = time.perf_counter()

    def check(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))
        return ok

    def finish(self):
        dt = time.perf_counter() - self.t0
        limit = LIMIT_S.get(self.number)
        if limit is not None:
            self.check(f"runtime<{limit:g}s", dt < limit, f"{dt:.2f}s")
        ok = all(c[1] for c in self.checks)
        failed = [f"{n} ({d})" if d else n for n, o, d in self.checks if not o]
        info = "; ".join(f"{n}={d}" for n, o, d in self.checks if o and d)
        line = f"[{'PASS' if ok else 'FAIL'}] C{self.number} {self.title} | {dt:.2f}s"
        if info:
            line += f" | {info}"
        if failed:
            line += f" | failed: {', '.join(failed)}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line


def test_c1_golden_example1():
    oracle_sr = oracles.sum_rule_order(golden("ex1_m0").coeffs, M1, 6)  # untimed independent check
    c = Criterion(1, "Example 1 golden table")
    m0 = golden("ex1_m0")
    lo, hi = m0.bounding_box()
    c.check("support[-3,3]^2", lo == (-3, -3) and hi == (3, 3))
    c.check("scale 1/243", m0.den == 243 or all((v.re * 243).denominator == 1 for v in m0.coeffs.values()))
    ctx = build_context(M1)
    c.check("point-a about 0", V.check_symmetry(m0, V.SymmetrySpec("point-a", (0, 0))).holds)
    sr = V.check_sum_rule_order(m0, ctx)
    c.check("sum rule>=4", sr >= 4, f"order {sr}")
    c.check("oracle agrees", oracle_sr == sr, f"oracle {oracle_sr}")
    c.check("m0(0)=1", m0.core_moment((0, 0)) == 1)
    c.finish()


def _scaled_match(t, ref):
    r = V.scalar_ratio(t, ref)
    return (r is not None), (V.format_scalar(*r) if r else "no scalar")


def test_c2_regeneration_example1():
    c = Criterion(2, "Example 1 regeneration")
    ctx, _ = pair_digits(build_context(M1, None, "minimal"), (0, 0))
    m0 = golden("ex1_m0")
    ext = build_extension(decompose(m0, ctx), decompose(LaurentPoly.const(1, 2), ctx))
    ext = symmetrize_rows(ext, symmetry_elements("point-a", 2), (0, 0))
    bank = extract_filterbank(ext, (0, 0), {"type": "point-a"})
    # the J-digit row has a zero dual; the reference pair sits in rows 2 and 3
    s1, s2 = LaurentPoly.monomial((0, -1), 2), LaurentPoly.monomial((0, 1), 2)
    refs = {"m1": (bank.masks[2], (s1 + s2).with_surd(3)), "m2": (bank.masks[3], (s1 - s2).with_surd(3)),
            "mt1": (bank.duals[2], golden("ex1_dual_m1")), "mt2": (bank.duals[3], golden("ex1_dual_m2"))}
    for name, (t, ref) in refs.items():
        ok, s = _scaled_match(t, ref)
        c.check(f"{name}~ref", ok, f"scalar {s}")
    for name, i in (("mt1", 2), ("mt2", 3)):
        vm = V.check_vanishing_moments(bank.duals[i])
        c.check(f"{name} VM exactly 4", vm == 4, f"VM {vm}")
    c.finish()


def test_c3_example2():
    c = Criterion(3, "Example 2 suite")
    m0, mt0 = golden("ex2_m0"), golden("ex2_dual_m0")
    found = [x for x, _ in V.detect_symmetry(m0, "axial")]
    c.check("axial center (1/2,1/2)", found == [(F(1, 2), F(1, 2))], str([tuple(map(str, x)) for x in found]))
    ctx = build_context(M2)
    sr = V.check_sum_rule_order(m0, ctx)
    c.check("sum rule 2", sr == 2, f"order {sr}")
    c.check("duality n=2", V.check_duality(m0, mt0, 2))
    bank = ex2_bank_build()
    pairs = {"m1": (bank.masks[1], "ex2_m1"), "m2": (bank.masks[3], "ex2_m2"), "m3": (bank.masks[2], "ex2_m3"),
             "m4": (bank.masks[4], "ex2_m4"), "mt1": (bank.duals[1], "ex2_dual_m1"),
             "mt2": (bank.duals[3], "ex2_dual_m2"), "mt3": (bank.duals[2], "ex2_dual_m3"),
             "mt4": (bank.duals[4], "ex2_dual_m4")}
    scalars = []
    for name, (t, g) in pairs.items():
        ok, s = _scaled_match(t, golden(g))
        c.check(f"{name}~ref", ok, s)
        scalars.append(s)
    c.check("octet scalars", True, ",".join(scalars))
    vms = [V.check_vanishing_moments(t) for t in bank.duals[1:]]
    c.check("all mt VM>=2", min(vms) >= 2, str(vms))
    c.finish()


def test_c4_example3():
    c = Criterion(4, "Example 3 suite")
    m0 = golden("ex3_m0")
    ctx = build_context(M3)
    c.check("4-fold symmetric about 0",
            V.check_symmetry(m0, V.SymmetrySpec("group", (0, 0), fourfold_group())).holds)
    sr = V.check_sum_rule_order(m0, ctx)
    c.check("sum rule 2", sr == 2, f"order {sr}")
    bank = ex3_bank_build()
    e1 = LaurentPoly.monomial((1, 0), 2)
    m1 = bank.masks[2]
    ok, s = _scaled_match(m1, e1)
    c.check("m1 == e(xi1)", m1 == e1, f"regenerated = {s} * e(xi1)")
    ok, s = _scaled_match(bank.duals[2], golden("ex3_dual_m1"))
    c.check("mt1~ref", ok, f"scalar {s}")
    vm = V.check_vanishing_moments(bank.duals[2])
    c.check("mt1 VM exactly 2", vm == 2, f"VM {vm}")
    c.finish()


def test_c5_builder_closure():
    c = Criterion(5, "builder closure (20 recipes x 5 builders)")
    total = 0
    for name, make in sorted(BUILDERS.items()):
        rng = random.Random(1000 + sum(map(ord, name)))
        bad = []
        for _ in range(20):
            desc, n, build = make(rng)
            bank = build()
            rep = verify_bank(bank, n)
            ext = build_extension(decompose(bank.masks[0], bank.ctx), decompose(bank.duals[0], bank.ctx))
            if not rep.ok or identity_defect(ext.N, ext.Nt) is not None:
                bad.append(desc)
            total += 1
        c.check(name, not bad, f"{20 - len(bad)}/20")
    c.check("recipes", total == 100, str(total))
    c.finish()


def test_c6_perturbations():
    from test_maskgen import random_perturbation
    c = Criterion(6, "perturbation family")
    ctx, part = pair_digits(build_context(M1, None, "minimal"), (0, 0))
    m0 = golden("ex1_m0")
    n = 4
    rng = random.Random(6)
    orders, sym_ok, changed = [], True, 0
    for _ in range(10):
        p = random_perturbation(rng, m0, ctx, part, n, "a")
        orders.append(V.check_sum_rule_order(p, ctx))
        sym_ok &= V.check_symmetry(p, V.SymmetrySpec("point-a", (0, 0))).holds
        changed += p != m0
    c.check("sum rule exactly 4", all(o == n for o in orders), str(orders))
    c.check("point-a symmetry", sym_ok)
    c.check("nontrivial", changed == 10, f"{changed}/10 changed")
    c.finish()


def test_c7_perfect_reconstruction():
    c = Criterion(7, "perfect reconstruction (50 grids per bank)")
    rng = np.random.default_rng(7)
    worst = 0.0
    for name, bank in (("ex1", ex1_bank_build()), ("ex2", ex2_bank_build()), ("ex3", ex3_bank_build())):
        exact_ok = True
        for _ in range(50):
            shape = tuple(int(v) for v in rng.integers(1, 7, size=2))
            origin = tuple(int(v) for v in rng.integers(-5, 6, size=2))
            x = Grid(rng.integers(-20, 21, size=shape), origin)
            y = synthesize(analyze(x, bank, 1, exact=True), bank)
            exact_ok &= y.tag == 1 and grids_equal(Grid(np.array(x.data, dtype=object), origin), y)
            xf = Grid(x.data.astype(float) + rng.standard_normal(shape), origin)
            yf = synthesize(analyze(xf, bank, 2, exact=False), bank)
            worst = max(worst, max_abs_diff(xf, yf) / float(np.abs(xf.data).max()))
        c.check(f"{name} exact", exact_ok)
    c.check(f"float rel err<={FLOAT_PR_TOL:g}", worst <= FLOAT_PR_TOL, f"{worst:.2e}")
    c.finish()


def test_c8_approximation_order():
    c = Criterion(8, "approximation rate")
    hat = approx_order_experiment(hat_bank_build(), lambda x: np.sin(2 * np.pi * x[..., 0]), [1, 2, 3, 4, 5], 2)
    c.check(f"hat slope within {SLOPE_TOL['hat']:.0%} of -2ln2", hat.rel_error() <= SLOPE_TOL["hat"],
            f"{hat.slope:.4f} vs {hat.expected:.4f} ({hat.rel_error():.1%})")
    ex1 = approx_order_experiment(ex1_bank_build(), lambda x: np.exp(-np.sum(x ** 2, axis=-1)), [1, 2, 3, 4], 4)
    c.check(f"ex1 slope within {SLOPE_TOL['ex1']:.0%} of -2ln3", ex1.rel_error() <= SLOPE_TOL["ex1"],
            f"{ex1.slope:.4f} vs {ex1.expected:.4f} ({ex1.rel_error():.1%})")
    c.finish()


REFERENCE_THETA = {
    2: {0: [1, 0], 1: [-1, 1]},
    3: {0: [1, 0, 0], 1: [F(-3, 2), 2, F(-1, 2)], 2: [F(1, 2), -1, F(1, 2)]},
    4: {0: [1, 0, 0, 0], 1: [F(-11, 6), 3, F(-3, 2), F(1, 3)],
        2: [1, F(-5, 2), 2, F(-1, 2)], 3: [F(-1, 6), F(1, 2), F(-1, 2), F(1, 6)]},
}


def test_c9_theta_tables():
    c = Criterion(9, "univariate generator tables")
    for n, table in REFERENCE_THETA.items():
        ok = all([univariate_theta(k, n).coefficient((l,)) for l in range(n)] == [F(v) for v in want]
                 for k, want in table.items())
        c.check(f"n={n}", ok)
    c.finish()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
