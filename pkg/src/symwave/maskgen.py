"""Builders for refinable masks with prescribed symmetry and sum-rule order.

All builders work through polyphase components: a mask has sum rule of order ``n``
with moments ``lambda`` exactly when every component ``mu_k`` satisfies

    d_beta(e^{2 pi i (M^{-1} s_k, xi)} mu_k) = lambda_beta / sqrt(m),   beta in Delta_n,

and symmetry is imposed by pairing or averaging components. Each builder re-checks
its output with :mod:`symwave.verify` before returning.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .errors import (GeneratorOffsetMismatch, OffsetMismatch, OffsetNotPreserved,
                     OffsetNotRepresentable, OrderViolation, ParityViolation,
                     PerturbationParityViolation, VerificationFailed)
from .lattice import (AXIAL_GROUP, DilationContext, PointDigitPartition, SymmetryGroup,
                      axial_partition, matvec)
from .laurent import (GaussianRational, LaurentPoly, conj_reflect, delta_n, mi_binom, mi_pow,
                      mi_sub, modulate, reflect, sub_indices, substitute)
from .polyphase import PolyphaseVector, recompose
from .theta import default_generators, symmetrize_theta
from . import verify as V

LambdaTable = Dict[Tuple[int, ...], GaussianRational]


def delta_lambda(d: int, n: int) -> LambdaTable:
    """``lambda'_beta = delta_{beta, 0}`` on ``Delta_n``."""
    return {b: GaussianRational(int(not any(b))) for b in delta_n(d, n)}


def shift_moments(lam: Mapping, a, n: int) -> LambdaTable:
    """Moments of ``e^{2 pi i (a, xi)} t`` from those of ``t`` (binomial shift)."""
    d = len(a)
    out = {}
    for beta in delta_n(d, n):
        acc = GaussianRational(0)
        for g in sub_indices(beta):
            v = lam.get(g)
            if v:
                acc = acc + GaussianRational.coerce(v) * (mi_binom(beta, g) * mi_pow(a, mi_sub(beta, g)))
        out[beta] = acc
    return out


def lambda_from_lambda_prime(lam_p: Mapping, ctx: DilationContext, c) -> LambdaTable:
    """``lambda_alpha = sum_{gamma <= alpha} lambda'_gamma C(alpha, gamma) (M^{-1} c)^{alpha - gamma}``.

    Examples
    --------
    >>> from symwave.lattice import build_context
    >>> lam = lambda_from_lambda_prime(delta_lambda(1, 3), build_context(2), [1])
    >>> [str(lam[(k,)]) for k in range(3)]
    ['1', '1/2', '1/4']
    """
    lam_p = {tuple(k): GaussianRational.coerce(v) for k, v in lam_p.items()}
    n = max(sum(b) for b in lam_p) + 1
    a = ctx.minv([Fraction(x) for x in c])
    return shift_moments(lam_p, a, n)


def check_lambda_prime(lam_p: Mapping, sense: str) -> None:
    """Raise :class:`ParityViolation` if ``lambda'`` does not suit the symmetry sense."""
    for b, v in lam_p.items():
        v = GaussianRational.coerce(v)
        if not any(b) and v != 1:
            raise ParityViolation("lambda'_0 must equal 1")
        odd = sum(b) % 2 == 1
        if sense == "a" and odd and v:
            raise ParityViolation(f"sense (a) needs lambda'_{b} = 0 for odd order")
        if sense == "b" and ((odd and v.re) or (not odd and v.im)):
            raise ParityViolation(f"sense (b) needs lambda'_{b} imaginary for odd and real for even order")


# ---------------------------------------------------------------------------
# point symmetry

@dataclass
class MaskRecipe:
    """Inputs of the point-symmetric builders.

    Parameters
    ----------
    ctx, partition : output of :func:`symwave.lattice.pair_digits`
    n : sum-rule order
    lambda_prime : table on ``Delta_n``; ``None`` means ``delta``
    policy : ``product`` or ``minimal`` default generators
    overrides : ``(slot, beta) -> G`` replacing a default generator. For ``J`` slots the
        polynomial is symmetrized before use; its offset must match the slot.
    real : reject complex ``lambda'`` and generators
    """

    ctx: DilationContext
    partition: PointDigitPartition
    n: int
    lambda_prime: Optional[Mapping] = None
    policy: str = "product"
    overrides: Dict = field(default_factory=dict)
    real: bool = False

    @property
    def lam_p(self) -> LambdaTable:
        if self.lambda_prime is None:
            return delta_lambda(self.ctx.dim, self.n)
        lam = {tuple(k): GaussianRational.coerce(v) for k, v in self.lambda_prime.items()}
        for b in delta_n(self.ctx.dim, self.n):
            lam.setdefault(b, GaussianRational(0))
        return lam


def _slot_shift(ctx: DilationContext, c, s) -> Tuple[Fraction, ...]:
    return ctx.minv([Fraction(x) - y for x, y in zip(c, s)])


def _frac_half(v) -> Tuple[Fraction, ...]:
    out = []
    for x in v:
        if (2 * x).denominator != 1:
            raise OffsetNotRepresentable(f"{x} is not a half-integer")
        out.append(x - (x.numerator // x.denominator))
    return tuple(out)


def _generators(recipe: MaskRecipe, slot: int, sigma) -> Dict[tuple, LaurentPoly]:
    gens = default_generators(recipe.ctx.dim, recipe.n, sigma, recipe.policy)
    for (j, b), G in recipe.overrides.items():
        if j == slot:
            if G.sigma != tuple(sigma):
                raise GeneratorOffsetMismatch(f"slot {slot} needs offset {tuple(map(str, sigma))}")
            gens[tuple(b)] = G
    return gens


def point_components(recipe: MaskRecipe, sense: str = "a") -> PolyphaseVector:
    """Polyphase components of the point-symmetric mask (before recomposition)."""
    ctx, part, n = recipe.ctx, recipe.partition, recipe.n
    lam_p = recipe.lam_p
    check_lambda_prime(lam_p, sense)
    if recipe.real and any(v.im for v in lam_p.values()):
        raise ParityViolation("real mode needs real lambda'")
    c = part.center
    d = ctx.dim
    m = ctx.m
    comps = [None] * m
    zero = (Fraction(0),) * d
    for i in part.I1:
        a = _slot_shift(ctx, c, ctx.digits[i])
        gens = _generators(recipe, i, zero)
        coeff = shift_moments(lam_p, a, n)
        mu = LaurentPoly.zero(d)
        for b in delta_n(d, n):
            if coeff[b]:
                mu = mu + gens[b].scale(coeff[b])
        mu = mu.div_sqrt(m)
        comps[i] = mu
        ip = part.pairing[i]
        comps[ip] = reflect(mu) if sense == "a" else conj_reflect(mu)
    flavor = "A" if sense == "a" else "B"
    for j in part.J:
        a = _slot_shift(ctx, c, ctx.digits[j])
        sig = _frac_half(a)
        gens = _generators(recipe, j, sig)
        X = LaurentPoly.zero(d, sig)
        for b in delta_n(d, n):
            v = lam_p[b]
            if not v:
                continue
            G = symmetrize_theta(gens[b], flavor, b, n)
            X = X + G.scale(v)
        comps[j] = modulate(X, a).div_sqrt(m)
    return PolyphaseVector(tuple(comps), ctx)


def _require(rec: V.PropertyRecord, what: str):
    if not rec.holds:
        raise VerificationFailed(f"{what}: {rec.witness}")


def verify_mask(m0: LaurentPoly, ctx: DilationContext, n: int, spec: V.SymmetrySpec,
                lam: Optional[Mapping] = None) -> None:
    """Exact post-conditions shared by all builders."""
    if m0.surd != 1 or m0.core_moment((0,) * ctx.dim) != 1:
        raise VerificationFailed("m0(0) != 1")
    _require(V.check_symmetry(m0, spec), "symmetry")
    rep = V.sum_rule_report(m0, ctx, n)
    if rep.order < n:
        raise VerificationFailed(f"sum rule order {rep.order} < {n}: {rep.witness}")
    if lam is not None:
        got = V.mask_lambda(m0, ctx, n)
        for b, v in got.items():
            if v != GaussianRational.coerce(lam.get(b, 0)):
                raise VerificationFailed(f"lambda_{b} = {v}, expected {lam.get(b)}")


def build_point_mask(recipe: MaskRecipe, sense: str = "a") -> LaurentPoly:
    """Mask point-symmetric about the partition center with sum rule ``recipe.n``.

    Sense ``a`` gives ``h_k = h_{2c-k}``; sense ``b`` gives ``h_k = conj(h_{2c-k})``.
    """
    m0 = recompose(point_components(recipe, sense))
    c = recipe.partition.center
    kind = "point-a" if sense == "a" else "point-b"
    lam = lambda_from_lambda_prime(recipe.lam_p, recipe.ctx, c)
    verify_mask(m0, recipe.ctx, recipe.n, V.SymmetrySpec(kind, c), lam)
    if recipe.real and not m0.is_real:
        raise VerificationFailed("real mode produced complex coefficients")
    return m0


def build_linear_phase_mask(ctx: DilationContext, partition: PointDigitPartition, n: int,
                            policy: str = "product", overrides=None) -> LaurentPoly:
    """The ``lambda' = delta`` member: ``d_beta(m0(M^{*-1} .)) = (M^{-1} c)^beta``."""
    recipe = MaskRecipe(ctx, partition, n, None, policy, dict(overrides or {}))
    m0 = build_point_mask(recipe, "a")
    a = ctx.minv(partition.center)
    got = V.mask_lambda(m0, ctx, n)
    for b, v in got.items():
        if v != mi_pow(a, b):
            raise VerificationFailed(f"linear-phase moment {b} fails")
    return m0


# ---------------------------------------------------------------------------
# perturbations of a point-symmetric mask

def pi_alpha(alpha: Sequence[int]) -> LaurentPoly:
    """``prod_j (1 - e^{2 pi i xi_j})^{alpha_j}``."""
    d = len(alpha)
    out = LaurentPoly.const(1, d)
    for j, e in enumerate(alpha):
        f = LaurentPoly({(0,) * d: 1, tuple(int(i == j) for i in range(d)): -1})
        out = out * f ** e
    return out


def re_im_pi(alpha) -> Tuple[LaurentPoly, LaurentPoly]:
    """Real and imaginary parts (as functions of ``xi``) of ``Pi_alpha``."""
    P = pi_alpha(alpha)
    cp = conj_reflect(P)
    return (P + cp).scale(Fraction(1, 2)), (P - cp).scale(GaussianRational(0, Fraction(-1, 2)))


@dataclass(frozen=True)
class Perturbation:
    """One term of the general form.

    For a ``J`` slot supply ``A`` (and optionally ``B``): the component gains
    ``e^{2 pi i (a_j, xi)} (A Re Pi_alpha + B Im Pi_alpha) / sqrt(m)``. For a paired slot
    ``i`` in ``I1`` supply ``T``: the component gains ``T Pi_alpha / sqrt(m)`` and its partner
    the reflected term.
    """

    slot: int
    alpha: Tuple[int, ...]
    A: Optional[LaurentPoly] = None
    B: Optional[LaurentPoly] = None
    T: Optional[LaurentPoly] = None


def perturb_general_form(m0: LaurentPoly, ctx: DilationContext, partition: PointDigitPartition,
                         n: int, terms: Sequence[Perturbation], sense: str = "a") -> LaurentPoly:
    """Add sum-rule-preserving symmetric perturbations to a point-symmetric mask.

    Raises
    ------
    OrderViolation
        If some ``[alpha] != n``.
    PerturbationParityViolation
        If ``A``/``B``/``T`` lack the parity the sense requires.
    """
    d, m = ctx.dim, ctx.m
    c = partition.center
    delta = LaurentPoly.zero(d)
    op = reflect if sense == "a" else conj_reflect
    for term in terms:
        alpha = tuple(term.alpha)
        if sum(alpha) != n:
            raise OrderViolation(f"[alpha] = {sum(alpha)} but n = {n}")
        P = pi_alpha(alpha)
        if term.slot in partition.J:
            a = _slot_shift(ctx, c, ctx.digits[term.slot])
            sig = _frac_half(a)
            A = term.A if term.A is not None else LaurentPoly.zero(d, sig)
            B = term.B if term.B is not None else LaurentPoly.zero(d, sig)
            if sense == "a":
                if reflect(A) != A or reflect(B) != -B:
                    raise PerturbationParityViolation("sense (a) needs A even and B odd")
            else:
                if conj_reflect(A) != A or conj_reflect(B) != B:
                    raise PerturbationParityViolation("sense (b) needs A and B real-valued")
            re_p, im_p = re_im_pi(alpha)
            try:
                Y = A * re_p + B * im_p
            except OffsetMismatch:
                raise GeneratorOffsetMismatch("A and B must share the slot offset") from None
            if Y.is_zero:
                continue
            if Y.sigma != sig:
                raise GeneratorOffsetMismatch(f"slot {term.slot} needs offset {tuple(map(str, sig))}")
            # e(s_j) e(a_j, M^* xi) Y(M^* xi) = e(c, xi) Y(M^* xi)
            delta = delta + modulate(substitute(Y, ctx.M), c).scale(Fraction(1, m))
        elif term.slot in partition.I1:
            T = term.T if term.T is not None else LaurentPoly.zero(d)
            X = T * P
            if X.is_zero:
                continue
            if any(X.par):
                raise GeneratorOffsetMismatch("paired slots need integer offsets")
            si = ctx.digits[term.slot]
            sp = ctx.digits[partition.pairing[term.slot]]
            Xs = substitute(X, ctx.M)
            delta = delta + (modulate(Xs, si) + modulate(op(Xs), sp)).scale(Fraction(1, m))
        else:
            raise ValueError(f"slot {term.slot} is not in J or I1")
    out = m0 + delta
    kind = "point-a" if sense == "a" else "point-b"
    verify_mask(out, ctx, n, V.SymmetrySpec(kind, c), V.mask_lambda(m0, ctx, n))
    return out


# ---------------------------------------------------------------------------
# orbit engine: axial and other group symmetries

def _t_action(X: LaurentPoly, E, c) -> LaurentPoly:
    """``T_E X = e^{2 pi i (c - E c, xi)} X(E^* xi)``: coefficient at ``n`` moves to
    ``E (n - c) + c``."""
    shift = tuple(x - y for x, y in zip(c, matvec(E, c)))
    return modulate(substitute(X, E), shift)


def orbit_mask(ctx: DilationContext, elems, c, n: int, policy: str = "product",
               overrides=None) -> LaurentPoly:
    """Mask invariant under ``T_E`` for all ``E`` with linear-phase moments about ``c``.

    On coset ``k`` the coefficients are ``(1/m) sum_beta (-a_k)^beta G_beta`` placed at
    ``M p + s_k`` with ``a_k = M^{-1}(s_k - c)``; the piece is averaged over the coset's
    stabilizer and copied to the rest of its orbit.
    """
    d, m = ctx.dim, ctx.m
    c = tuple(Fraction(x) for x in c)
    for E in elems:
        v = tuple(x - y for x, y in zip(c, matvec(E, c)))
        if any(x.denominator != 1 for x in v):
            raise OffsetNotPreserved(f"(I - E) c is not integral for E={E}")
    gens = default_generators(d, n, None, policy)
    overrides = dict(overrides or {})

    def image(k, E):
        v = tuple(Fraction(x) - y for x, y in zip(ctx.digits[k], c))
        w = tuple(int(x + y) for x, y in zip(matvec(E, v), c))
        return ctx.coset_index(w)

    done = set()
    total = LaurentPoly.zero(d)
    for k in range(m):
        if k in done:
            continue
        s = ctx.digits[k]
        a = ctx.minv([Fraction(x) - y for x, y in zip(s, c)])
        z = LaurentPoly.zero(d)
        for b in delta_n(d, n):
            G = overrides.get((k, b), gens[b])
            w = mi_pow(tuple(-x for x in a), b)
            if w:
                z = z + G.scale(w)
        z = z.scale(Fraction(1, m))
        piece = modulate(substitute(z, ctx.M), s)
        stab = [E for E in elems if image(k, E) == k]
        avg = LaurentPoly.zero(d)
        for E in stab:
            avg = avg + _t_action(piece, E, c)
        avg = avg.scale(Fraction(1, len(stab)))
        total = total + avg
        done.add(k)
        for E in elems:
            kk = image(k, E)
            if kk not in done:
                done.add(kk)
                total = total + _t_action(avg, E, c)
    return total


def build_axial_mask(ctx: DilationContext, center_kind: str = "integer", n: int = 2,
                     policy: str = "product", overrides=None):
    """Axially symmetric mask with sum rule ``n``.

    Returns ``(m0, ctx, partition)``; the context carries the rectangular digit set.
    """
    ctx, part = axial_partition(ctx, center_kind)
    m0 = orbit_mask(ctx, AXIAL_GROUP, part.center, n, policy, overrides)
    lam = lambda_from_lambda_prime(delta_lambda(2, n), ctx, part.center)
    verify_mask(m0, ctx, n, V.SymmetrySpec("axial", part.center), lam)
    return m0, ctx, part


def build_group_mask(ctx: DilationContext, H: SymmetryGroup, n: int, policy: str = "product",
                     G0: Optional[Dict[int, LaurentPoly]] = None):
    """H-symmetric mask about 0 with ``d_beta(m0) = delta_{beta 0}`` on ``Delta_n``.

    Component ``j`` is ``G^H_0 e^{-2 pi i (M^{-1} s_j, xi)} / sqrt(m)`` where ``G^H_0`` is the
    group average of a ``Theta_{0,n}`` generator with offset ``frac(M^{-1} s_j)``.
    Returns ``(m0, dual)`` with the trivial dual ``1``.
    """
    d, m = ctx.dim, ctx.m
    comps = []
    for j, s in enumerate(ctx.digits):
        a = ctx.minv(s)
        try:
            sig = _frac_half(a)
        except OffsetNotRepresentable:
            raise OffsetNotPreserved(f"M^-1 s_{j} is not a half-integer vector") from None
        G = (G0 or {}).get(j)
        if G is None:
            G = default_generators(d, n, sig, policy)[(0,) * d]
        try:
            GH = symmetrize_theta(G, "Group", (0,) * d, n, H)
        except OffsetMismatch:
            raise OffsetNotPreserved(f"group action changes the offset of slot {j}") from None
        comps.append(modulate(GH, tuple(-x for x in a)).div_sqrt(m))
    m0 = recompose(PolyphaseVector(tuple(comps), ctx))
    verify_mask(m0, ctx, n, V.SymmetrySpec("group", (Fraction(0),) * d, tuple(H.elements)),
                delta_lambda(d, n))
    for b in delta_n(d, n):
        if m0.core_moment(b) != int(not any(b)):
            raise VerificationFailed("d_beta(m0) != delta")
    return m0, LaurentPoly.const(1, d)
