"""End-to-end construction of symmetric filter banks."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .dualgen import build_dual_mask
from .extension import FilterBank, build_extension, extract_filterbank, symmetrize_rows
from .lattice import AXIAL_GROUP, DilationContext, build_context, identity, pair_digits, validate_group
from .laurent import LaurentPoly
from .maskgen import MaskRecipe, build_axial_mask, build_group_mask, build_point_mask
from .polyphase import decompose
from . import verify as V


def symmetry_elements(kind: str, d: int, group=None):
    if kind in ("point-a", "point-b"):
        return (identity(d), tuple(tuple(-int(i == j) for j in range(d)) for i in range(d)))
    if kind == "axial":
        return AXIAL_GROUP
    if kind == "group":
        return tuple(group.elements if hasattr(group, "elements") else group)
    raise ValueError(f"unknown symmetry kind {kind!r}")


def bank_from_masks(m0: LaurentPoly, dual: LaurentPoly, ctx: DilationContext, kind: str,
                    center, group=None, provenance: Optional[dict] = None) -> FilterBank:
    """Extend ``(m0, dual)`` to a filter bank whose wavelets inherit the symmetry.

    ``ctx`` must carry the symmetry-adapted digits (paired digits for point symmetry,
    the rectangle for axial symmetry, stable digits for a group).
    """
    center = tuple(Fraction(x) for x in center)
    ext = build_extension(decompose(m0, ctx), decompose(dual, ctx))
    elems = symmetry_elements(kind, ctx.dim, group)
    ext = symmetrize_rows(ext, elems, center)
    sym = {"type": kind, "center": center}
    if kind == "group":
        sym["group"] = elems
    return extract_filterbank(ext, center, sym, provenance)


def design_point(M, c, n: int, sense: str = "a", policy: str = "product",
                 lambda_prime: Optional[Mapping] = None, digits=None, selection: str = "minimal",
                 dual: str = "auto", overrides=None) -> FilterBank:
    """Point-symmetric bank: mask, dual, extension and row symmetrization."""
    ctx = build_context(M, digits, selection)
    ctx, part = pair_digits(ctx, c)
    recipe = MaskRecipe(ctx, part, n, lambda_prime, policy, dict(overrides or {}))
    m0 = build_point_mask(recipe, sense)
    kind = "point-a" if sense == "a" else "point-b"
    if dual == "auto" and sense == "b":
        dual = "point-b"
    dm = build_dual_mask(m0, part.center, n, dual, policy=policy)
    return bank_from_masks(m0, dm, ctx, kind, part.center,
                           provenance={"builder": "point", "sense": sense, "n": n, "policy": policy})


def design_axial(M, center_kind: str, n: int, policy: str = "product") -> FilterBank:
    m0, ctx, part = build_axial_mask(build_context(M), center_kind, n, policy)
    dm = build_dual_mask(m0, part.center, n,
                         "trivial" if center_kind == "integer" and _is_delta_dual(m0, part.center, n)
                         else "axial", policy=policy)
    return bank_from_masks(m0, dm, ctx, "axial", part.center,
                           provenance={"builder": "axial", "center_kind": center_kind, "n": n,
                                       "policy": policy, "case": part.case})


def _is_delta_dual(m0, c, n) -> bool:
    from .dualgen import solve_dual_moments
    rho = solve_dual_moments(m0, c, n)
    return all(v == int(not any(b)) for b, v in rho.items())


def design_group(M, H, n: int, policy: str = "minimal", digits=None) -> FilterBank:
    ctx = build_context(M, digits)
    G = validate_group(ctx, H)
    m0, dm = build_group_mask(ctx, G, n, policy)
    zero = (Fraction(0),) * ctx.dim
    return bank_from_masks(m0, dm, ctx, "group", zero, G,
                           provenance={"builder": "group", "n": n, "policy": policy})


def verify_bank(bank: FilterBank, n: int) -> V.VerificationReport:
    """All exact checks a bank must pass for order ``n``.

    Sum rule of the refinable mask, duality with its dual, symmetry of every nonzero
    mask, vanishing moments of the nonzero dual wavelets and the polyphase identity.
    """
    ctx = bank.ctx
    rep = V.VerificationReport()
    m0, d0 = bank.masks[0], bank.duals[0]
    rep.add(V.PropertyRecord("m0(0)=1", m0.surd == 1 and m0.core_moment((0,) * ctx.dim) == 1))
    sr = V.sum_rule_report(m0, ctx)
    rep.add(V.PropertyRecord("sum_rule", (sr.order or 0) >= n, order=sr.order, witness=sr.witness))
    ok = V.check_duality(m0, d0, n)
    rep.add(V.PropertyRecord("duality", ok, order=n, witness=None if ok else V.duality_witness(m0, d0, n)))
    kind = bank.symmetry.get("type", "none")
    if kind != "none":
        spec = V.SymmetrySpec(kind, tuple(bank.center), bank.symmetry.get("group"))
        rep.add(V.check_symmetry(m0, spec))
        rec = V.check_symmetry(d0, spec)
        rec.name += ":dual"
        rep.add(rec)
        for role, polys in (("wavelet", bank.masks), ("dual_wavelet", bank.duals)):
            for nu in range(1, len(polys)):
                if polys[nu].is_zero:
                    continue
                desc = V.symmetry_descriptor(polys[nu], kind, bank.symmetry.get("group"))
                rep.add(V.PropertyRecord(f"symmetry:{role}{nu}", desc is not None,
                                         centers=[desc["center"]] if desc else []))
    for nu in range(1, len(bank.duals)):
        t = bank.duals[nu]
        if t.is_zero:
            continue
        vm = V.check_vanishing_moments(t)
        rep.add(V.PropertyRecord(f"vanishing_moments:dual_wavelet{nu}", vm >= n, order=vm))
    rep.add(V.PropertyRecord("perfect_reconstruction", bank.check_pr()))
    return rep
