"""Polyphase matrix extension, symmetry-preserving row transforms and filter banks.

The primal matrix ``N`` has first row ``(mu_00, ..., mu_0,m-1, mu_0m)`` with
``mu_0m = 1 - sum_k mu_0k conj(dual mu_0k)`` and row ``k+1`` equal to
``(e_k, -conj(dual mu_0k))``. The dual matrix has first row ``(dual mu_00, ..., 1)`` and
row ``k+1`` equal to ``(delta_kl - dual mu_0l conj(mu_0k), -conj(mu_0k))``. Then
``Nt^* N = I`` and rows ``1..m`` give the wavelet masks.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import ContextMismatch, SymmetryPreconditionFailed, VerificationFailed
from .lattice import DilationContext, identity, matmul, matvec
from .laurent import LaurentPoly, conj_reflect
from .polyphase import PolyphaseVector, decompose, recompose
from . import verify as V

Matrix = List[List[LaurentPoly]]


@dataclass
class ExtensionMatrices:
    N: Matrix
    Nt: Matrix
    ctx: DilationContext
    row_meta: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.N)


def _sum(polys: Sequence[LaurentPoly], d: int) -> LaurentPoly:
    out = LaurentPoly.zero(d)
    for p in polys:
        if not p.is_zero:
            out = out + p
    return out


def identity_defect(N: Matrix, Nt: Matrix) -> Optional[Tuple[int, int]]:
    """First ``(i, j)`` where ``(Nt^* N)_{ij} != delta_ij``, or ``None``."""
    size = len(N)
    d = N[0][0].dim
    ct = [[conj_reflect(Nt[r][i]) for i in range(size)] for r in range(size)]
    for i in range(size):
        for j in range(size):
            terms = [ct[r][i] * N[r][j] for r in range(size)
                     if not ct[r][i].is_zero and not N[r][j].is_zero]
            if _sum(terms, d) != LaurentPoly.const(int(i == j), d):
                return (i, j)
    return None


def build_extension(pv0: PolyphaseVector, pvt0: PolyphaseVector) -> ExtensionMatrices:
    """Square extension of the polyphase rows of a mask and its dual.

    Raises
    ------
    ContextMismatch
        If the rows come from different digit sets.
    VerificationFailed
        If ``Nt^* N = I`` fails (cannot happen for consistent inputs).
    """
    ctx = pv0.ctx
    if pvt0.ctx.M != ctx.M or pvt0.ctx.digits != ctx.digits:
        raise ContextMismatch("mask and dual use different dilation contexts")
    m, d = ctx.m, ctx.dim
    one = LaurentPoly.const(1, d)
    zero = LaurentPoly.zero(d)
    mu = list(pv0.components)
    mut = list(pvt0.components)
    cmu = [conj_reflect(x) for x in mu]
    cmut = [conj_reflect(x) for x in mut]
    last = one - _sum([mu[k] * cmut[k] for k in range(m)], d)
    N = [mu + [last]]
    Nt = [mut + [one]]
    for k in range(m):
        N.append([one if l == k else zero for l in range(m)] + [-cmut[k]])
        Nt.append([(one if l == k else zero) - mut[l] * cmu[k] for l in range(m)] + [-cmu[k]])
    ext = ExtensionMatrices(N, Nt, ctx, [{} for _ in range(m + 1)])
    bad = identity_defect(N, Nt)
    if bad is not None:
        raise VerificationFailed(f"extension identity fails at entry {bad}")
    return ext


# ---------------------------------------------------------------------------
# row symmetrization

def _elementary_basis(elems) -> Optional[Tuple[list, Dict]]:
    """Basis of an elementary abelian 2-group and each element's coordinate vector."""
    d = len(elems[0])
    I = identity(d)
    for a in elems:
        if matmul(a, a) != I:
            return None
        for b in elems:
            if matmul(a, b) != matmul(b, a):
                return None
    coords = {I: ()}
    basis = []
    for g in elems:
        if g in coords:
            continue
        basis.append(g)
        new = {}
        for h, v in coords.items():
            new[matmul(h, g)] = v + (len(basis) - 1,)
        coords.update(new)
    bits = {h: tuple(int(i in v) for i in range(len(basis))) for h, v in coords.items()}
    return basis, bits


def digit_action(ctx: DilationContext, elems, c) -> Dict[Tuple[int, int], int]:
    """``(e, k) -> index of the coset of E (s_k - c) + c``."""
    c = tuple(Fraction(x) for x in c)
    out = {}
    for e, E in enumerate(elems):
        for k, s in enumerate(ctx.digits):
            v = tuple(Fraction(x) - y for x, y in zip(s, c))
            w = tuple(x + y for x, y in zip(matvec(E, v), c))
            if any(x.denominator != 1 for x in w):
                raise SymmetryPreconditionFailed("(I - E) c is not integral")
            out[(e, k)] = ctx.coset_index(tuple(int(x) for x in w))
    return out


def symmetrize_rows(ext: ExtensionMatrices, elems, c) -> ExtensionMatrices:
    """Mix wavelet rows along digit orbits so every wavelet becomes (anti)symmetric.

    For an orbit ``x_0, ..., x_{r-1}`` of a group of involutions, the primal rows become
    ``sum_b chi_a(g_b) Q_{x_b}`` and the dual rows ``(1/r) sum_b chi_a(g_b) Qt_{x_b}`` for the
    ``r`` characters ``chi_a`` trivial on the stabilizer (trivial character first), where
    ``g_b x_0 = x_b``. The two transforms are mutually adjoint, so ``Nt^* N = I`` survives.
    For other groups only singleton orbits are accepted.
    """
    ctx = ext.ctx
    elems = tuple(elems)
    act = digit_action(ctx, elems, c)
    m = ctx.m
    seen = set()
    orbits = []
    for k in range(m):
        if k in seen:
            continue
        orb = sorted({act[(e, k)] for e in range(len(elems))})
        seen.update(orb)
        orbits.append(orb)
    N = [list(r) for r in ext.N]
    Nt = [list(r) for r in ext.Nt]
    meta = [dict(x) for x in ext.row_meta]
    d = ctx.dim
    if any(len(o) > 1 for o in orbits):
        eb = _elementary_basis(elems)
        if eb is None:
            raise SymmetryPreconditionFailed("non-singleton digit orbits need a group of commuting involutions")
        basis, bits = eb
        nb = len(basis)
        chars = [tuple((b >> i) & 1 for i in range(nb)) for b in range(2 ** nb)]
        for orb in orbits:
            if len(orb) == 1:
                continue
            x0 = orb[0]
            stab = [elems[e] for e in range(len(elems)) if act[(e, x0)] == x0]
            g_of = {}
            for e, E in enumerate(elems):
                g_of.setdefault(act[(e, x0)], E)

            def chi(a, g):
                return -1 if sum(x * y for x, y in zip(a, bits[g])) % 2 else 1

            good = [a for a in chars if all(chi(a, h) == 1 for h in stab)]
            r = len(orb)
            if len(good) != r:
                raise SymmetryPreconditionFailed("orbit does not carry a regular group action")
            old = {x: (N[x + 1], Nt[x + 1]) for x in orb}
            for a_idx, a in enumerate(good):
                signs = [chi(a, g_of[x]) for x in orb]
                row = [_sum([old[x][0][col].scale(sg) for x, sg in zip(orb, signs)], d)
                       for col in range(m + 1)]
                rowt = [_sum([old[x][1][col].scale(Fraction(sg, r)) for x, sg in zip(orb, signs)], d)
                        for col in range(m + 1)]
                tgt = orb[a_idx] + 1
                N[tgt] = row
                Nt[tgt] = rowt
                meta[tgt] = {"orbit": list(orb), "signs": {str(list(map(list, E))): chi(a, E)
                                                           for E in elems}}
    out = ExtensionMatrices(N, Nt, ctx, meta)
    bad = identity_defect(N, Nt)
    if bad is not None:
        raise VerificationFailed(f"extension identity fails after row transforms at {bad}")
    return out


# ---------------------------------------------------------------------------
# filter banks

@dataclass
class FilterBank:
    """Refinable mask, dual and the ``m`` wavelet pairs with their metadata.

    ``masks[0]`` / ``duals[0]`` are the refinable masks; ``masks[nu]`` / ``duals[nu]`` for
    ``nu = 1..m`` are the wavelet masks.
    """

    ctx: DilationContext
    masks: List[LaurentPoly]
    duals: List[LaurentPoly]
    center: Tuple[Fraction, ...]
    symmetry: Dict[str, Any]
    meta: List[Dict[str, Any]] = field(default_factory=list)
    dual_meta: List[Dict[str, Any]] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.ctx.m

    @property
    def dim(self) -> int:
        return self.ctx.dim

    def polyphase_matrices(self) -> Tuple[Matrix, Matrix]:
        P = [list(decompose(t, self.ctx).components) for t in self.masks]
        Pt = [list(decompose(t, self.ctx).components) for t in self.duals]
        return P, Pt

    def check_pr(self) -> bool:
        """``calM^T conj(calMt) = I_m`` exactly."""
        P, Pt = self.polyphase_matrices()
        m, d = self.m, self.dim
        for k in range(m):
            for l in range(m):
                acc = _sum([P[nu][k] * conj_reflect(Pt[nu][l]) for nu in range(m + 1)
                            if not P[nu][k].is_zero and not Pt[nu][l].is_zero], d)
                if acc != LaurentPoly.const(int(k == l), d):
                    return False
        return True

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for t in self.masks + self.duals:
            h.update(repr(sorted(t.terms.items())).encode())
            h.update(f"/{t.den}/{t.surd}/{t.par};".encode())
        return h.hexdigest()[:16]


def _mask_meta(t: LaurentPoly, ctx, kind: str, group, refinable: bool) -> Dict[str, Any]:
    info: Dict[str, Any] = {"vanishing_moments": V.check_vanishing_moments(t)}
    if refinable:
        info["sum_rule"] = V.check_sum_rule_order(t, ctx)
    info["symmetry"] = V.symmetry_descriptor(t, kind, group)
    return info


def extract_filterbank(ext: ExtensionMatrices, center, symmetry: Optional[Dict[str, Any]] = None,
                       provenance: Optional[Dict[str, Any]] = None) -> FilterBank:
    """Recompose rows ``0..m`` of both matrices into masks and annotate them."""
    ctx = ext.ctx
    m = ctx.m
    masks = [recompose(PolyphaseVector(tuple(ext.N[nu][:m]), ctx)) for nu in range(m + 1)]
    duals = [recompose(PolyphaseVector(tuple(ext.Nt[nu][:m]), ctx)) for nu in range(m + 1)]
    symmetry = dict(symmetry or {"type": "none"})
    kind = symmetry.get("type", "point-a")
    group = symmetry.get("group")
    if kind == "none":
        kind = "point-a"
    bank = FilterBank(ctx, masks, duals, tuple(Fraction(x) for x in center), symmetry,
                      provenance=dict(provenance or {}))
    bank.meta = [_mask_meta(t, ctx, kind, group, nu == 0) for nu, t in enumerate(masks)]
    bank.dual_meta = [_mask_meta(t, ctx, kind, group, nu == 0) for nu, t in enumerate(duals)]
    if not bank.check_pr():
        raise VerificationFailed("extracted bank violates the polyphase identity")
    bank.provenance.setdefault("fingerprint", bank.fingerprint())
    return bank
