"""Exact property checks: sum rules, moments, symmetry, duality."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import Singular
from .lattice import DilationContext, frac_inverse, identity, matvec, Y2
from .laurent import (GaussianRational, LaurentPoly, conj_reflect, delta_n, mi_binom, mi_sub,
                      split_square, sub_indices)

N_MAX = 8


@dataclass
class PropertyRecord:
    name: str
    holds: bool
    order: Optional[int] = None
    witness: Any = None
    centers: List[Any] = field(default_factory=list)

    def to_dict(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return str(x)
            if isinstance(x, GaussianRational):
                return str(x)
            if isinstance(x, (list, tuple)):
                return [enc(y) for y in x]
            if isinstance(x, dict):
                return {str(k): enc(v) for k, v in x.items()}
            return x
        return {k: enc(v) for k, v in asdict(self).items()}


@dataclass
class VerificationReport:
    records: List[PropertyRecord] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.holds for r in self.records)

    def add(self, rec: PropertyRecord) -> "VerificationReport":
        self.records.append(rec)
        return self

    def failures(self) -> List[PropertyRecord]:
        return [r for r in self.records if not r.holds]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "records": [r.to_dict() for r in self.records]}

    def summary(self) -> str:
        lines = []
        for r in self.records:
            s = f"{'PASS' if r.holds else 'FAIL'} {r.name}"
            if r.order is not None:
                s += f" order={r.order}"
            if r.centers:
                s += f" centers={[[str(x) for x in c] for c in r.centers]}"
            if not r.holds and r.witness is not None:
                s += f" witness={r.witness}"
            lines.append(s)
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# sum rules and moments

def _coset_moments(t: LaurentPoly, ctx: DilationContext, beta) -> List[Tuple[int, int]]:
    """Integer numerators of ``sum_{n in coset j} h_n (M^{-1} n)^beta``; the common
    denominator is shared by all cosets."""
    out = [(0, 0)] * ctx.m
    adj = ctx.adj
    for f, (a, b) in t.terms.items():
        k = tuple(x // 2 for x in f)
        j = ctx.coset_index(k)
        y = matvec(adj, k)
        w = 1
        for x, e in zip(y, beta):
            if e:
                w *= x ** e
        ra, rb = out[j]
        out[j] = (ra + a * w, rb + b * w)
    return out


def sum_rule_report(t: LaurentPoly, ctx: DilationContext, n_max: int = N_MAX) -> PropertyRecord:
    """Largest ``n`` such that every coset carries the same moments of order < ``n``.

    With ``lambda_beta = sum_n h_n (M^{-1} n)^beta`` this is condition (19) in the form
    ``m * sum_{n in coset k} h_n (M^{-1} n)^beta = lambda_beta`` for every digit ``k``.
    """
    if any(t.par) or t.is_zero:
        return PropertyRecord("sum_rule", False, 0, "non-integer offset or zero mask")
    d = ctx.dim
    for n in range(n_max):
        for beta in delta_n(d, n + 1):
            if sum(beta) != n:
                continue
            mom = _coset_moments(t, ctx, beta)
            for j in range(1, ctx.m):
                if mom[j] != mom[0]:
                    return PropertyRecord("sum_rule", n > 0, n,
                                          {"beta": list(beta), "digit": j})
    return PropertyRecord("sum_rule", True, n_max)


def check_sum_rule_order(t: LaurentPoly, ctx: DilationContext, n_max: int = N_MAX) -> int:
    """Maximal sum-rule order (capped at ``n_max``).

    Examples
    --------
    >>> from symwave.lattice import build_context
    >>> check_sum_rule_order(LaurentPoly({(0,): 1, (1,): 1}).scale(Fraction(1, 2)), build_context(2))
    1
    """
    return sum_rule_report(t, ctx, n_max).order


def mask_lambda(t: LaurentPoly, ctx: DilationContext, n: int) -> Dict[tuple, GaussianRational]:
    """``lambda_beta = sum_k h_k (M^{-1} k)^beta`` for ``beta`` in ``Delta_n`` (exact)."""
    out = {}
    for beta in delta_n(ctx.dim, n):
        sa = sb = 0
        for f, (a, b) in t.terms.items():
            k = tuple(x // 2 for x in f)
            w = 1
            for x, e in zip(matvec(ctx.adj, k), beta):
                if e:
                    w *= x ** e
            sa += a * w
            sb += b * w
        q = t.den * ctx.det ** sum(beta)
        out[beta] = GaussianRational(Fraction(sa, q), Fraction(sb, q))
    return out


def check_vanishing_moments(t: LaurentPoly, n_max: int = N_MAX) -> int:
    """Largest ``n`` with ``d_beta(t) = 0`` for every ``[beta] < n``."""
    if t.is_zero:
        return n_max
    for n in range(n_max):
        for beta in delta_n(t.dim, n + 1):
            if sum(beta) == n and t.core_moment(beta):
                return n
    return n_max


def check_linear_phase_moments(t: LaurentPoly, n: int) -> Tuple[bool, Tuple[Fraction, ...]]:
    """Check ``d_beta(t) = c^beta`` on ``Delta_n`` with ``c`` read from first moments."""
    d = t.dim
    if t.surd != 1 or t.core_moment((0,) * d) != 1:
        return False, ()
    c = []
    for i in range(d):
        e = tuple(int(i == j) for j in range(d))
        v = t.core_moment(e)
        if v.im:
            return False, ()
        c.append(v.re)
    for beta in delta_n(d, n):
        target = Fraction(1)
        for x, e in zip(c, beta):
            target *= x ** e
        if t.core_moment(beta) != target:
            return False, tuple(c)
    return True, tuple(c)


def check_duality(m0: LaurentPoly, dual: LaurentPoly, n: int) -> bool:
    """``d_beta(1 - m0 * conj(dual)) = 0`` for all ``[beta] < n`` (Leibniz form)."""
    return duality_witness(m0, dual, n) is None


def duality_witness(m0: LaurentPoly, dual: LaurentPoly, n: int):
    if m0.dim != dual.dim:
        return "dimension mismatch"
    f, r = split_square(m0.surd * dual.surd)
    if r != 1:
        return "product is irrational"
    d = m0.dim
    betas = delta_n(d, n)
    da = {b: m0.core_moment(b) for b in betas}
    cd = conj_reflect(dual)
    db = {b: cd.core_moment(b) for b in betas}
    for beta in betas:
        acc = GaussianRational(0)
        for alpha in sub_indices(beta):
            acc = acc + da[alpha] * db[mi_sub(beta, alpha)] * mi_binom(beta, alpha)
        acc = acc * f
        if acc != int(not any(beta)):
            return {"beta": list(beta), "value": str(acc)}
    return None


def check_refinable_symmetry_center(ctx: DilationContext, c) -> Tuple[Fraction, ...]:
    """Symmetry center ``(M - I)^{-1} c`` of the refinable function."""
    d = ctx.dim
    A = [[ctx.M[i][j] - int(i == j) for j in range(d)] for i in range(d)]
    try:
        inv = frac_inverse(A)
    except ZeroDivisionError:
        raise Singular("1 is an eigenvalue of M") from None
    c = [Fraction(x) for x in c]
    return tuple(sum(inv[i][j] * c[j] for j in range(d)) for i in range(d))


# ---------------------------------------------------------------------------
# symmetry

@dataclass(frozen=True)
class SymmetrySpec:
    """Requested symmetry.

    ``kind`` is ``point-a``, ``point-b``, ``axial`` or ``group``; ``center`` a half-integer
    vector; ``group`` the matrices (for ``group``); ``signs`` one sign per group element
    (``+1`` symmetric, ``-1`` antisymmetric), defaulting to all ``+1``.
    """

    kind: str
    center: Tuple[Fraction, ...]
    group: Optional[Tuple] = None
    signs: Optional[Tuple[int, ...]] = None


def group_elements(spec: SymmetrySpec, d: int):
    if spec.kind in ("point-a", "point-b"):
        return (identity(d), tuple(tuple(-int(i == j) for j in range(d)) for i in range(d)))
    if spec.kind == "axial":
        return (identity(2), ((-1, 0), (0, -1)), Y2, ((1, 0), (0, -1)))
    if spec.kind == "group":
        return tuple(spec.group)
    raise ValueError(f"unknown symmetry kind {spec.kind!r}")


def _symmetry_witness(t: LaurentPoly, kind: str, c2: Sequence[int], elems, signs):
    """First coefficient violating the symmetry; ``c2`` is twice the center."""
    conj = kind == "point-b"
    ident = identity(t.dim)
    for E, eps in zip(elems, signs):
        if E == ident:
            continue
        for F, (a, b) in t.terms.items():
            G = tuple(x + y for x, y in zip(matvec(E, tuple(p - q for p, q in zip(F, c2))), c2))
            want = (eps * a, -eps * b) if conj else (eps * a, eps * b)
            if t.terms.get(G, (0, 0)) != want:
                return {"E": [list(r) for r in E], "freq": [Fraction(x, 2) for x in F]}
    return None


def check_symmetry(t: LaurentPoly, spec: SymmetrySpec) -> PropertyRecord:
    """Coefficient-level symmetry check; also reports detected centers."""
    d = t.dim
    elems = group_elements(spec, d)
    signs = spec.signs or (1,) * len(elems)
    c2 = tuple(int(2 * Fraction(x)) for x in spec.center)
    w = _symmetry_witness(t, spec.kind, c2, elems, signs)
    rec = PropertyRecord(f"symmetry:{spec.kind}", w is None, witness=w)
    rec.centers = [list(c) for c, _ in detect_symmetry(t, spec.kind, spec.group)]
    return rec


def _candidate_centers(t: LaurentPoly) -> List[Tuple[Fraction, ...]]:
    if t.is_zero:
        return []
    F = list(t.terms)
    d = t.dim
    mid = tuple(Fraction(min(f[i] for f in F) + max(f[i] for f in F), 4) for i in range(d))
    cen = tuple(Fraction(sum(f[i] for f in F), 2 * len(F)) for i in range(d))
    out = []
    for c in (mid, cen):
        if all((2 * x).denominator == 1 for x in c) and c not in out:
            out.append(c)
    return out


def detect_symmetry(t: LaurentPoly, kind: str = "point-a", group=None):
    """All ``(center, signs)`` under which ``t`` is (anti)symmetric for ``kind``."""
    spec0 = SymmetrySpec(kind, (Fraction(0),) * t.dim, group)
    elems = group_elements(spec0, t.dim)
    out = []
    for c in _candidate_centers(t):
        c2 = tuple(int(2 * x) for x in c)
        signs = []
        ok = True
        for E in elems:
            found = None
            for eps in (1, -1):
                if _symmetry_witness(t, kind, c2, (E,), (eps,)) is None:
                    found = eps
                    break
            if found is None:
                ok = False
                break
            signs.append(found)
        if ok:
            out.append((c, tuple(signs)))
    return out


def symmetry_descriptor(t: LaurentPoly, kind: str, group=None) -> Optional[dict]:
    found = detect_symmetry(t, kind, group)
    if not found:
        return None
    c, signs = found[0]
    return {"type": kind, "center": [str(x) for x in c], "signs": list(signs)}


# ---------------------------------------------------------------------------
# comparisons

def scalar_ratio(a: LaurentPoly, b: LaurentPoly):
    """Return ``(q, r)`` with ``a = q * sqrt(r) * b`` exactly, or ``None``."""
    if a.dim != b.dim or a.is_zero or b.is_zero or a.par != b.par or set(a.terms) != set(b.terms):
        return None
    F = next(iter(b.terms))
    x = GaussianRational(*a.terms[F]) / GaussianRational(*b.terms[F])
    ka = GaussianRational(Fraction(1, a.den))
    kb = GaussianRational(Fraction(1, b.den))
    for G, v in b.terms.items():
        if GaussianRational(*a.terms[G]) != x * GaussianRational(*v):
            return None
    q = x * ka / kb
    # sqrt(ra)/sqrt(rb) = sqrt(ra*rb)/rb
    f, r = split_square(a.surd * b.surd)
    return q * Fraction(f, b.surd), r


def format_scalar(q: GaussianRational, r: int) -> str:
    return str(q) if r == 1 else f"({q})*sqrt({r})"
