"""Integer lattices, digit sets and symmetry-adapted digit partitions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (DigitNotStable, NotAGroup, NotAxialAdmissible, NotCompatibleWithM,
                     NotExpanding, Unimodular)

Vec = Tuple[int, ...]
Mat = Tuple[Tuple[int, ...], ...]

_EIG_MARGIN = 2.0 ** -40


def as_matrix(M) -> Mat:
    rows = [list(r) for r in M] if not isinstance(M, int) else [[M]]
    out = []
    for r in rows:
        row = []
        for x in r:
            if int(x) != x:
                raise ValueError("matrix entries must be integers")
            row.append(int(x))
        out.append(tuple(row))
    d = len(out)
    if any(len(r) != d for r in out):
        raise ValueError("matrix must be square")
    return tuple(out)


def frac_inverse(M: Sequence[Sequence]) -> List[List[Fraction]]:
    """Exact inverse by Gauss-Jordan elimination over the rationals."""
    d = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(d)] for i, row in enumerate(M)]
    for col in range(d):
        piv = next((r for r in range(col, d) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(d):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[d:] for row in a]


def int_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    a = [list(map(int, r)) for r in M]
    d = len(a)
    sign, prev = 1, 1
    for k in range(d - 1):
        if a[k][k] == 0:
            sw = next((r for r in range(k + 1, d) if a[r][k] != 0), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[d - 1][d - 1]


def matvec(M, v) -> tuple:
    return tuple(sum(r[j] * v[j] for j in range(len(v))) for r in M)


def matmul(A, B) -> Mat:
    n = len(B)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(len(B[0])))
                 for i in range(len(A)))


def transpose(A) -> Mat:
    return tuple(zip(*A))


def identity(d: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


@dataclass(frozen=True)
class DilationContext:
    """Dilation matrix with its digit set.

    Attributes
    ----------
    M : tuple of tuples
        Integer dilation matrix.
    m : int
        ``|det M|``.
    digits : tuple of vectors
        One representative per coset of ``Z^d / M Z^d``.
    """

    M: Mat
    m: int
    digits: Tuple[Vec, ...]
    det: int
    adj: Mat
    _index: Dict[Vec, int] = field(default=None, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.M)

    @property
    def Mt(self) -> Mat:
        return transpose(self.M)

    @property
    def Minv(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return tuple(tuple(Fraction(x, self.det) for x in row) for row in self.adj)

    def minv(self, v) -> Tuple[Fraction, ...]:
        """``M^{-1} v`` exactly (``v`` may hold Fractions)."""
        return tuple(sum(Fraction(r[j]) * v[j] for j in range(len(v))) / self.det for r in self.adj)

    def minv_int(self, v) -> Optional[Vec]:
        """``M^{-1} v`` if it is an integer vector, else ``None``."""
        w = matvec(self.adj, v)
        if any(x % self.det for x in w):
            return None
        return tuple(x // self.det for x in w)

    def coset_key(self, v) -> Vec:
        return tuple(x % self.m for x in matvec(self.adj, v))

    def coset_index(self, v) -> int:
        return self._index[self.coset_key(tuple(int(x) for x in v))]

    def with_digits(self, digits) -> "DilationContext":
        return _make_context(self.M, self.det, self.adj, digits)


def _make_context(M, det, adj, digits) -> DilationContext:
    digits = tuple(tuple(int(x) for x in s) for s in digits)
    m = abs(det)
    probe = DilationContext(M, m, digits, det, adj, {})
    index = {}
    for k, s in enumerate(digits):
        key = probe.coset_key(s)
        if key in index:
            raise ValueError(f"digits {digits[index[key]]} and {s} are congruent modulo M")
        index[key] = k
    if len(digits) != m:
        raise ValueError(f"expected {m} digits, got {len(digits)}")
    return DilationContext(M, m, digits, det, adj, index)


def _box_digits(M, det, adj) -> List[Vec]:
    d = len(M)
    corners = [matvec(M, c) for c in itertools.product((0, 1), repeat=d)]
    lo = [min(c[i] for c in corners) for i in range(d)]
    hi = [max(c[i] for c in corners) for i in range(d)]
    out = []
    for s in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        w = matvec(adj, s)
        # M^{-1}s = w/det in [0,1)^d
        if all(0 <= Fraction(x, det) < 1 for x in w):
            out.append(tuple(s))
    return out


def _minimal_digits(M, det, adj) -> List[Vec]:
    d, m = len(M), abs(det)
    best: Dict[Vec, tuple] = {}
    R = 1
    while True:
        for s in itertools.product(range(-R, R + 1), repeat=d):
            key = tuple(x % m for x in matvec(adj, s))
            rank = (sum(map(abs, s)), tuple(map(abs, s)), tuple(-x for x in s))
            if key not in best or rank < best[key][0]:
                best[key] = (rank, s)
        if len(best) == m:
            # the next shell cannot beat an L1 norm not exceeding R
            if all(r[0][0] <= R for r in best.values()):
                break
        R += 1
    return [s for _, s in best.values()]


def _order_digits(digits: List[Vec]) -> List[Vec]:
    zero = tuple(0 for _ in digits[0])
    rest = sorted(s for s in digits if s != zero)
    return ([zero] if zero in digits else []) + rest


def build_context(M, digits=None, selection: str = "box") -> DilationContext:
    """Validate a dilation matrix and choose its digits.

    Parameters
    ----------
    M : integer matrix (or int for ``d == 1``)
    digits : optional explicit digit list
    selection : {"box", "minimal"}
        ``box`` takes representatives with ``M^{-1}s`` in ``[0,1)^d``; ``minimal`` takes
        representatives of least l1 norm, ties going to the smallest leading coordinates.

    Examples
    --------
    >>> build_context([[2, 0], [0, 2]]).digits
    ((0, 0), (0, 1), (1, 0), (1, 1))
    """
    M = as_matrix(M)
    det = int_det(M)
    if abs(det) <= 1:
        raise Unimodular(f"|det M| = {abs(det)}")
    ev = np.linalg.eigvals(np.array(M, dtype=float))
    if np.min(np.abs(ev)) <= 1 + _EIG_MARGIN:
        raise NotExpanding(f"eigenvalue of modulus {np.min(np.abs(ev)):.6g}")
    inv = frac_inverse(M)
    adj = tuple(tuple(int(x * det) for x in row) for row in inv)
    if digits is None:
        if selection == "box":
            digits = _box_digits(M, det, adj)
        elif selection == "minimal":
            digits = _minimal_digits(M, det, adj)
        else:
            raise ValueError(f"unknown digit selection {selection!r}")
        digits = _order_digits(digits)
    return _make_context(M, det, adj, digits)


# ---------------------------------------------------------------------------
# point symmetry

@dataclass(frozen=True)
class PointDigitPartition:
    """Digits split into self-paired ones (``J``) and pairs ``i <-> i'``."""

    I1: Tuple[int, ...]
    I2: Tuple[int, ...]
    J: Tuple[int, ...]
    pairing: Dict[int, int]
    center: Tuple[Fraction, ...]

    @property
    def center2(self) -> Vec:
        return tuple(int(2 * c) for c in self.center)

    def partner(self, i: int) -> int:
        if i in self.pairing:
            return self.pairing[i]
        for a, b in self.pairing.items():
            if b == i:
                return a
        return i


def _half_vec(c, d) -> Tuple[Fraction, ...]:
    if isinstance(c, (int, Fraction, str)):
        c = [c] * d if d == 1 else [c]
    c = tuple(Fraction(x) for x in c)
    if any((2 * x).denominator != 1 for x in c):
        raise ValueError("center must be a half-integer vector")
    return c


def pair_digits(ctx: DilationContext, c=None) -> Tuple[DilationContext, PointDigitPartition]:
    """Pair digits for point symmetry about ``c``, adjusting representatives.

    Returns the (possibly) updated context and the partition; for every pair
    ``2c - s_i - s_i' == 0`` holds exactly.
    """
    d = ctx.dim
    c = _half_vec(c if c is not None else [0] * d, d)
    c2 = tuple(int(2 * x) for x in c)
    digits = list(ctx.digits)
    I1, I2, J, pairing = [], [], [], {}
    seen = set()
    for i in range(ctx.m):
        if i in seen:
            continue
        l = ctx.coset_index(tuple(a - b for a, b in zip(c2, digits[i])))
        seen.update((i, l))
        if l == i:
            J.append(i)
        else:
            I1.append(i)
            I2.append(l)
            pairing[i] = l
            digits[l] = tuple(a - b for a, b in zip(c2, digits[i]))
    new = ctx.with_digits(digits)
    return new, PointDigitPartition(tuple(I1), tuple(I2), tuple(J), pairing, c)


# ---------------------------------------------------------------------------
# axial symmetry

Y2 = ((-1, 0), (0, 1))
AXIAL_GROUP = (identity(2), ((-1, 0), (0, -1)), Y2, ((1, 0), (0, -1)))


@dataclass(frozen=True)
class AxialDigitPartition:
    """Digit families of the axial construction.

    ``families`` maps a family name (``J``, ``R``, ``R'``, ``Q``, ``Q'``, ``T``, ``T'``,
    ``U``, ``U'``, ``K``, ``K'``, ``K''``, ``K'''``) to digit indices; ``case`` is the
    parity type I..IV and ``center`` is ``(0,0)`` or ``(1/2,1/2)``.
    """

    case: str
    center: Tuple[Fraction, ...]
    families: Dict[str, Tuple[int, ...]]
    d1: int
    d2: int

    @property
    def center_kind(self) -> str:
        return "integer" if all(x.denominator == 1 for x in self.center) else "semi-integer"


def axial_dims(M: Mat) -> Tuple[int, int]:
    """``(d1, d2)`` with ``M Z^2 = diag(d1, d2) Z^2`` for an admissible ``M``."""
    if len(M) != 2:
        raise NotAxialAdmissible("axial symmetry needs d = 2")
    (a, b), (c, e) = M
    if b == 0 and c == 0:
        return abs(a), abs(e)
    if a == 0 and e == 0:
        return abs(b), abs(c)
    raise NotAxialAdmissible("M must be diagonal or antidiagonal")


def _rect(dl: int) -> range:
    return range(-((dl - 1) // 2), dl // 2 + 1)


def axial_partition(ctx: DilationContext, center_kind: str = "integer"
                    ) -> Tuple[DilationContext, AxialDigitPartition]:
    """Rectangular digit set and its family split for axial symmetry."""
    d1, d2 = axial_dims(ctx.M)
    digits = [(v1, v2) for v1 in _rect(d1) for v2 in _rect(d2)]
    digits = _order_digits(digits)
    new = ctx.with_digits(digits)
    fam: Dict[str, List[int]] = {}

    def put(name, idx):
        fam.setdefault(name, []).append(idx)

    if center_kind == "integer":
        center = (Fraction(0), Fraction(0))
        case = {(1, 1): "I", (0, 1): "II", (1, 0): "III", (0, 0): "IV"}[(d1 % 2, d2 % 2)]
        for idx, (v1, v2) in enumerate(digits):
            sp1 = v1 == 0 or (d1 % 2 == 0 and v1 == d1 // 2)
            sp2 = v2 == 0 or (d2 % 2 == 0 and v2 == d2 // 2)
            if sp1 and sp2:
                put("J", idx)
            elif sp2:
                put(("R" if v2 == 0 else "U") + ("" if v1 > 0 else "'"), idx)
            elif sp1:
                put(("Q" if v1 == 0 else "T") + ("" if v2 > 0 else "'"), idx)
            else:
                put("K" + {(True, True): "", (True, False): "'", (False, True): "''",
                           (False, False): "'''"}[(v1 > 0, v2 > 0)], idx)
    elif center_kind == "semi-integer":
        center = (Fraction(1, 2), Fraction(1, 2))
        case = {(0, 0): "I", (1, 0): "II", (0, 1): "III", (1, 1): "IV"}[(d1 % 2, d2 % 2)]
        for idx, (v1, v2) in enumerate(digits):
            sp1 = d1 % 2 == 1 and v1 == -((d1 - 1) // 2)
            sp2 = d2 % 2 == 1 and v2 == -((d2 - 1) // 2)
            if sp1 and sp2:
                put("J", idx)
            elif sp1:
                put("T" + ("" if v2 >= 1 else "'"), idx)
            elif sp2:
                put("U" + ("" if v1 >= 1 else "'"), idx)
            else:
                put("K" + {(True, True): "", (True, False): "'", (False, True): "''",
                           (False, False): "'''"}[(v1 >= 1, v2 >= 1)], idx)
    else:
        raise ValueError("center_kind must be 'integer' or 'semi-integer'")
    families = {k: tuple(v) for k, v in fam.items()}
    return new, AxialDigitPartition(case, center, families, d1, d2)


# ---------------------------------------------------------------------------
# symmetry groups

@dataclass(frozen=True)
class SymmetryGroup:
    """Finite unimodular group compatible with ``M``; ``residues[(e, j)] = r_j^E``."""

    elements: Tuple[Mat, ...]
    residues: Dict[Tuple[int, int], Vec]


def _close_under_products(elems):
    s = set(elems)
    return all(matmul(a, b) in s for a in elems for b in elems)


def validate_group(ctx: DilationContext, H, check_digits: bool = True) -> SymmetryGroup:
    """Check closure, compatibility with ``M`` and digit stability.

    Raises
    ------
    NotAGroup, NotCompatibleWithM, DigitNotStable
    """
    elems = tuple(dict.fromkeys(as_matrix(E) for E in H))
    d = ctx.dim
    for E in elems:
        if len(E) != d:
            raise NotAGroup("element dimension differs from M")
        if abs(int_det(E)) != 1:
            raise NotAGroup(f"{E} is not unimodular")
    if identity(d) not in elems or not _close_under_products(elems):
        raise NotAGroup("set is not closed under multiplication or lacks the identity")
    s = set(elems)
    for E in elems:
        conj = matmul(matmul(ctx.M, E), ctx.adj)
        if any(x % ctx.det for row in conj for x in row):
            raise NotCompatibleWithM(f"M E M^-1 is not integral for E={E}")
        conj = tuple(tuple(x // ctx.det for x in row) for row in conj)
        if conj not in s:
            raise NotCompatibleWithM(f"M E M^-1 leaves the group for E={E}")
    residues = {}
    for e, E in enumerate(elems):
        for j, sj in enumerate(ctx.digits):
            diff = tuple(a - b for a, b in zip(matvec(E, sj), sj))
            r = ctx.minv_int(diff)
            if r is None:
                if check_digits:
                    raise DigitNotStable(E, j)
                continue
            residues[(e, j)] = r
    return SymmetryGroup(elems, residues)


def fourfold_group() -> Tuple[Mat, ...]:
    """The 8-element symmetry group of the square lattice."""
    gens = [((0, 1), (-1, 0)), ((0, 1), (1, 0))]
    out = {identity(2)}
    frontier = list(out)
    while frontier:
        g = frontier.pop()
        for h in gens:
            p = matmul(g, h)
            if p not in out:
                out.add(p)
                frontier.append(p)
    return tuple(sorted(out))


def axis_group(d: int) -> Tuple[Mat, ...]:
    """All ``diag(+-1, ..., +-1)``."""
    return tuple(tuple(tuple(sg[i] if i == j else 0 for j in range(d)) for i in range(d))
                 for sg in itertools.product((1, -1), repeat=d))
