"""Polyphase decomposition of masks with respect to a digit set.

Convention: ``tau_k(xi) = sqrt(m) * sum_p h_{M p + s_k} exp(2 pi i (p, xi))`` so that

    t(xi) = m^{-1/2} * sum_k exp(2 pi i (s_k, xi)) * tau_k(M^* xi)

holds as an identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .errors import ContextMismatch, DimMismatch, NonIntegerOffset
from .lattice import DilationContext, PointDigitPartition, matvec
from .laurent import LaurentPoly, conj_reflect, modulate, reflect


@dataclass(frozen=True)
class PolyphaseVector:
    components: Tuple[LaurentPoly, ...]
    ctx: DilationContext

    def __getitem__(self, k) -> LaurentPoly:
        return self.components[k]

    def __len__(self):
        return len(self.components)


def decompose(t: LaurentPoly, ctx: DilationContext) -> PolyphaseVector:
    """Split an integer-degree polynomial along the cosets of ``M Z^d``.

    Examples
    --------
    >>> from symwave.lattice import build_context
    >>> pv = decompose(LaurentPoly.const(1, 1), build_context(2))
    >>> pv[0].surd, pv[1].is_zero
    (2, True)
    """
    if any(t.par):
        raise NonIntegerOffset("decompose needs an integer-degree polynomial")
    if t.dim != ctx.dim:
        raise DimMismatch("poly and context dimensions differ")
    buckets: List[dict] = [dict() for _ in range(ctx.m)]
    det = ctx.det
    for f, v in t.terms.items():
        k = tuple(x // 2 for x in f)
        j = ctx.coset_index(k)
        s = ctx.digits[j]
        w = matvec(ctx.adj, tuple(a - b for a, b in zip(k, s)))
        p = tuple(x // det for x in w)
        buckets[j][tuple(2 * x for x in p)] = v
    zero = (0,) * t.dim
    comps = tuple(LaurentPoly._raw(t.dim, zero, b, t.den, t.surd * ctx.m) for b in buckets)
    return PolyphaseVector(comps, ctx)


def recompose(pv: PolyphaseVector) -> LaurentPoly:
    """Inverse of :func:`decompose`."""
    ctx = pv.ctx
    d = ctx.dim
    comps = [c for c in pv.components if not c.is_zero]
    if any(c.dim != d for c in pv.components):
        raise DimMismatch("component dimension differs from context")
    if not comps:
        return LaurentPoly.zero(d)
    if len({c.surd for c in comps}) != 1:
        # components of mixed scale: bring them to a common denominator one by one
        out = LaurentPoly.zero(d)
        for k, c in enumerate(pv.components):
            if not c.is_zero:
                out = out + recompose(PolyphaseVector(tuple(c if i == k else LaurentPoly.zero(d)
                                                            for i in range(ctx.m)), ctx))
        return out
    den = 1
    for c in comps:
        den = den * c.den // _gcd(den, c.den)
    terms = {}
    for k, c in enumerate(pv.components):
        if c.is_zero:
            continue
        if any(c.par):
            raise NonIntegerOffset("polyphase components must have integer degrees")
        s = ctx.digits[k]
        f = den // c.den
        for p2, (a, b) in c.terms.items():
            p = tuple(x // 2 for x in p2)
            n = tuple(x + y for x, y in zip(matvec(ctx.M, p), s))
            terms[tuple(2 * x for x in n)] = (a * f, b * f)
    surd = comps[0].surd
    return LaurentPoly._raw(d, (0,) * d, terms, den * ctx.m, surd * ctx.m)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def component_phase(ctx: DilationContext, u) -> Tuple:
    """``M^{-1} u`` as an integer vector (raises if not integral)."""
    w = ctx.minv_int(u)
    if w is None:
        raise ContextMismatch(f"M^-1 {u} is not integral")
    return w


def check_polyphase_symmetry(pv: PolyphaseVector, partition: PointDigitPartition,
                             sense: str = "a") -> bool:
    """Polyphase form of point symmetry about the partition's center.

    Sense ``a``: ``mu_i(xi) = e(M^{-1}(2c - s_i - s_i'), xi) mu_i'(-xi)``; sense ``b`` uses
    ``conj(mu_i'(xi))`` instead of ``mu_i'(-xi)``.
    """
    ctx = pv.ctx
    c2 = partition.center2
    op = reflect if sense == "a" else conj_reflect
    for i in range(ctx.m):
        ip = partition.partner(i)
        u = tuple(a - b - e for a, b, e in zip(c2, ctx.digits[i], ctx.digits[ip]))
        w = ctx.minv_int(u)
        if w is None:
            return False
        if pv[i] != modulate(op(pv[ip]), w):
            return False
    return True
