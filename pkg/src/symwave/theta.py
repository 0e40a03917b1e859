"""Generators of the classes ``Theta_{beta,n}`` and their symmetric variants.

``G`` belongs to ``Theta_{beta,n}`` when ``d_alpha(G) = delta_{alpha,beta}`` for every
``alpha`` with ``[alpha] < n`` (normalized derivatives at the origin).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import FlavorParityViolation, SingularSupport, VerificationFailed
from .laurent import (LaurentPoly, conj_reflect, delta_n, embed, mi_pow, normalized_derivative,
                      reflect, substitute)


def solve_exact(A: List[List[Fraction]], B: List[List[Fraction]]) -> List[List[Fraction]]:
    """Solve ``A X = B`` exactly; columns of ``B`` are right-hand sides.

    Pivots are chosen by the smallest numerator-denominator product among nonzero
    candidates, which keeps intermediate sizes small.
    """
    n = len(A)
    a = [[Fraction(x) for x in row] + [Fraction(x) for x in brow] for row, brow in zip(A, B)]
    w = len(a[0])
    for col in range(n):
        cands = [r for r in range(col, n) if a[r][col] != 0]
        if not cands:
            raise SingularSupport("moment matrix is singular")
        piv = min(cands, key=lambda r: abs(a[r][col].numerator * a[r][col].denominator))
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:w] for row in a]


def univariate_theta(k: int, n: int, sigma=0) -> LaurentPoly:
    """Univariate ``g_k`` with support ``{0..n-1} + sigma`` and ``d_j(g_k) = delta_{jk}``.

    Examples
    --------
    >>> univariate_theta(1, 2).coeffs
    {(0,): GaussianRational(-1, 0), (1,): GaussianRational(1, 0)}
    """
    if not 0 <= k < n:
        raise ValueError("need 0 <= k < n")
    s = Fraction(sigma)
    V = [[(l + s) ** j for l in range(n)] for j in range(n)]
    rhs = [[Fraction(int(j == k))] for j in range(n)]
    h = solve_exact(V, rhs)
    return LaurentPoly({(l,): h[l][0] for l in range(n)}, sigma=(s,))


def product_theta(beta: Sequence[int], n: int, sigma=None) -> LaurentPoly:
    """Tensor-product generator ``prod_r g_{beta_r}(xi_r)`` with offset ``sigma``."""
    d = len(beta)
    sigma = tuple(Fraction(x) for x in (sigma if sigma is not None else (0,) * d))
    if sum(beta) >= n:
        raise ValueError("beta must lie in Delta_n")
    out = LaurentPoly.const(1, d)
    for r in range(d):
        out = out * embed(univariate_theta(beta[r], n, sigma[r]), r, d)
    return out


def in_theta(G: LaurentPoly, beta: Sequence[int], n: int) -> bool:
    beta = tuple(beta)
    for a in delta_n(G.dim, n):
        if normalized_derivative(G, a) != int(a == beta):
            return False
    return True


def symmetrize_theta(G: LaurentPoly, flavor: str, beta: Sequence[int], n: int = None,
                     H=None) -> LaurentPoly:
    """Symmetric variant of a generator.

    Parameters
    ----------
    flavor : {"A", "B", "AxSym", "Group"}
        ``A``: ``(G(xi) + G(-xi))/2``; ``B``: ``(G + (-1)^[beta] conj(G))/2``;
        ``AxSym``: average over ``{I, -I, Y, -Y}``; ``Group``: average over ``H``.
    n : int, optional
        When given, membership in ``Theta_{beta,n}`` is re-verified.
    """
    order = sum(beta)
    d = G.dim
    if flavor == "A":
        if order % 2:
            raise FlavorParityViolation("A-flavor needs even [beta]")
        out = (G + reflect(G)).scale(Fraction(1, 2))
    elif flavor == "B":
        c = conj_reflect(G)
        out = (G + (c if order % 2 == 0 else -c)).scale(Fraction(1, 2))
    elif flavor == "AxSym":
        if any(b % 2 for b in beta):
            raise FlavorParityViolation("AxSym flavor needs every coordinate of beta even")
        Y = ((-1, 0), (0, 1))
        mY = ((1, 0), (0, -1))
        out = (G + substitute(G, Y) + substitute(G, mY) + reflect(G)).scale(Fraction(1, 4))
    elif flavor == "Group":
        if H is None:
            raise ValueError("Group flavor needs the group elements")
        elems = H.elements if hasattr(H, "elements") else H
        acc = LaurentPoly.zero(d, G.sigma)
        for E in elems:
            acc = acc + substitute(G, E)
        out = acc.scale(Fraction(1, len(elems)))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    if n is not None and not in_theta(out, beta, n):
        raise VerificationFailed(f"{flavor}-symmetrized generator left Theta_{tuple(beta)},{n}")
    return out


def minimal_support_theta(betas: Sequence[Sequence[int]], n: int, support=None, sigma=None,
                          conditions: Optional[Sequence] = None) -> List[LaurentPoly]:
    """Generators whose support is a prescribed key set of size ``|conditions|``.

    Parameters
    ----------
    betas : list of multi-indices
    n : order
    support : key set, defaults to ``Delta_n`` read as integer points
    conditions : multi-indices imposed, default ``Delta_n``

    Raises
    ------
    SingularSupport
        If the moment matrix on the chosen support is singular.
    """
    d = len(betas[0])
    conds = list(conditions) if conditions is not None else delta_n(d, n)
    supp = [tuple(k) for k in (support if support is not None else delta_n(d, n))]
    if len(supp) != len(conds):
        raise SingularSupport("support size must equal the number of conditions")
    sigma = tuple(Fraction(x) for x in (sigma if sigma is not None else (0,) * d))
    pts = [tuple(Fraction(x) + s for x, s in zip(k, sigma)) for k in supp]
    V = [[mi_pow(p, a) for p in pts] for a in conds]
    idx = {tuple(a): i for i, a in enumerate(conds)}
    rhs = [[Fraction(int(i == idx[tuple(b)])) for b in betas] for i in range(len(conds))]
    X = solve_exact(V, rhs)
    return [LaurentPoly({k: X[i][c] for i, k in enumerate(supp)}, sigma=sigma)
            for c in range(len(betas))]


def default_generators(d: int, n: int, sigma=None, policy: str = "product") -> Dict[tuple, LaurentPoly]:
    """``beta -> G_beta`` for all ``beta`` in ``Delta_n``."""
    betas = delta_n(d, n)
    if policy == "product":
        return {b: product_theta(b, n, sigma) for b in betas}
    if policy == "minimal":
        return dict(zip(betas, minimal_support_theta(betas, n, sigma=sigma)))
    raise ValueError(f"unknown generator policy {policy!r}")
