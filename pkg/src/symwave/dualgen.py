"""Dual refinable masks matched to a primal mask up to a prescribed order."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Optional

from .errors import NotNormalized, ParityViolation, TrivialDualInvalid, VerificationFailed
from .lattice import AXIAL_GROUP, identity
from .laurent import (GaussianRational, LaurentPoly, conj_reflect, delta_n, mi_binom, mi_sub,
                      modulate, sub_indices, substitute)
from .theta import default_generators
from . import verify as V

RhoTable = Dict[tuple, GaussianRational]


def solve_dual_moments(m0: LaurentPoly, c, n: int) -> RhoTable:
    """Moments ``rho_beta = d_beta(e^{-2 pi i (c, xi)} dual)`` forced by the duality condition.

    With ``a = e^{-2 pi i (c, xi)} m0`` and ``g_gamma`` the moments of ``conj`` of the
    demodulated dual, ``sum_{alpha <= beta} C(beta, alpha) d_alpha(a) g_{beta - alpha}``
    must equal ``delta_{beta 0}``; the system is triangular.

    Examples
    --------
    >>> hat = LaurentPoly({(-1,): Fraction(1, 4), (0,): Fraction(1, 2), (1,): Fraction(1, 4)})
    >>> str(solve_dual_moments(hat, [0], 4)[(2,)])
    '-1/2'
    """
    d = m0.dim
    c = tuple(Fraction(x) for x in c)
    if m0.surd != 1 or m0.core_moment((0,) * d) != 1:
        raise NotNormalized("m0(0) must equal 1")
    a = modulate(m0, tuple(-x for x in c))
    da = {b: a.core_moment(b) for b in delta_n(d, n)}
    g: Dict[tuple, GaussianRational] = {}
    for beta in delta_n(d, n):
        acc = GaussianRational(int(not any(beta)))
        for alpha in sub_indices(beta):
            if any(alpha):
                acc = acc - da[alpha] * g[mi_sub(beta, alpha)] * mi_binom(beta, alpha)
        g[beta] = acc
    return {b: v.conjugate() * (-1) ** sum(b) for b, v in g.items()}


def _group_for(symmetry: str, d: int, group=None):
    if symmetry == "point-a" or symmetry == "point-b":
        return (identity(d), tuple(tuple(-int(i == j) for j in range(d)) for i in range(d)))
    if symmetry == "axial":
        return AXIAL_GROUP
    if symmetry == "group":
        return tuple(group.elements if hasattr(group, "elements") else group)
    raise ValueError(f"unknown symmetry {symmetry!r}")


def build_dual_mask(m0: LaurentPoly, c, n: int, symmetry: str = "point-a",
                    generators: Optional[Mapping] = None, policy: str = "product",
                    group=None) -> LaurentPoly:
    """Dual mask satisfying the duality condition to order ``n`` with matching symmetry.

    Parameters
    ----------
    symmetry : {"point-a", "point-b", "axial", "group", "trivial", "auto"}
        ``trivial`` returns ``e^{2 pi i (c, xi)}`` (``1`` when ``c = 0``) and is valid only
        when ``rho = delta``; ``auto`` picks it whenever valid and the center is integral,
        and otherwise falls back to ``point-a``.
    generators : ``beta -> G_beta`` overriding the defaults (offset ``frac(c)``). Each is
        symmetrized before use, so a plain ``Theta`` member suffices.

    Notes
    -----
    ``e^{-2 pi i (c, xi)} dual = sum_beta rho_beta G_beta`` averaged over the symmetry group;
    the average keeps the moments because ``rho`` inherits the symmetry of ``m0``.
    """
    d = m0.dim
    c = tuple(Fraction(x) for x in c)
    rho = solve_dual_moments(m0, c, n)
    is_delta = all(v == int(not any(b)) for b, v in rho.items())
    integral = all(x.denominator == 1 for x in c)
    if symmetry == "auto":
        symmetry = "trivial" if is_delta and integral else "point-a"
    if symmetry == "trivial":
        if not is_delta:
            raise TrivialDualInvalid("moments of m0 are not those of a pure phase")
        if not integral:
            raise TrivialDualInvalid("a pure-phase dual needs an integer center")
        return LaurentPoly.monomial(tuple(int(x) for x in c), d)
    elems = _group_for(symmetry, d, group)
    if symmetry == "point-a" and any(v for b, v in rho.items() if sum(b) % 2):
        raise ParityViolation("odd moments of m0 do not vanish about c")
    if symmetry == "axial" and any(v for b, v in rho.items() if any(x % 2 for x in b)):
        raise ParityViolation("axial duals need rho_beta = 0 when some beta_j is odd")
    sigma = tuple(x - (x.numerator // x.denominator) for x in c)
    gens = default_generators(d, n, sigma, policy)
    for b, G in (generators or {}).items():
        gens[tuple(b)] = G
    X = LaurentPoly.zero(d, sigma)
    for b in delta_n(d, n):
        if rho[b]:
            X = X + gens[b].scale(rho[b])
    if symmetry == "point-b":
        Xs = (X + conj_reflect(X)).scale(Fraction(1, 2))
    else:
        Xs = LaurentPoly.zero(d, sigma)
        for E in elems:
            Xs = Xs + substitute(X, E)
        Xs = Xs.scale(Fraction(1, len(elems)))
    dual = modulate(Xs, c)
    if not V.check_duality(m0, dual, n):
        raise VerificationFailed(f"dual fails the duality condition: {V.duality_witness(m0, dual, n)}")
    kind = "group" if symmetry == "group" else symmetry
    spec = V.SymmetrySpec(kind, c, tuple(elems) if kind == "group" else None)
    rec = V.check_symmetry(dual, spec)
    if not rec.holds:
        raise VerificationFailed(f"dual lacks {symmetry} symmetry: {rec.witness}")
    return dual
