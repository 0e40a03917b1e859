"""Discrete analysis/synthesis, cascade evaluation and approximation experiments.

Conventions (with ``h`` the coefficients of a mask and ``ht`` of its dual):

* analysis   ``y[k] = sqrt(m) sum_n x[n] conj(ht[n - M k])``
* synthesis  ``x[n] = sqrt(m) sum_nu sum_k y_nu[k] h_nu[n - M k]``
* refinement ``phi(x) = m sum_n h_n phi(M x + n)``; the cascade value with index ``alpha``
  at level ``j`` approximates ``phi(-M^{-j} alpha)``.

Exact mode keeps values as :class:`fractions.Fraction` (or Gaussian rationals) together
with a squarefree tag ``r``: a grid with tag ``r`` represents ``sqrt(r)`` times its data.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .errors import BankInvalid, ContextMismatch, NonFiniteSamples, VerificationFailed
from .extension import FilterBank
from .lattice import DilationContext, matvec
from .laurent import GaussianRational, LaurentPoly, split_square


# ---------------------------------------------------------------------------
# grids

@dataclass
class Grid:
    """Finitely supported function on ``Z^d``: ``data[i]`` is the value at ``origin + i``."""

    data: np.ndarray
    origin: Tuple[int, ...]
    tag: int = 1

    @property
    def dim(self) -> int:
        return self.data.ndim

    @property
    def lo(self) -> Tuple[int, ...]:
        return tuple(self.origin)

    @property
    def hi(self) -> Tuple[int, ...]:
        return tuple(o + s - 1 for o, s in zip(self.origin, self.data.shape))

    @classmethod
    def from_array(cls, arr, origin=None) -> "Grid":
        a = np.asarray(arr)
        return cls(a, tuple(origin) if origin is not None else (0,) * a.ndim)

    def value(self, k) -> object:
        idx = tuple(x - o for x, o in zip(k, self.origin))
        if all(0 <= i < s for i, s in zip(idx, self.data.shape)):
            return self.data[idx]
        return 0

    def on_box(self, lo, hi) -> np.ndarray:
        """Values on the box ``[lo, hi]`` with zero fill."""
        shape = tuple(b - a + 1 for a, b in zip(lo, hi))
        out = np.zeros(shape, dtype=self.data.dtype)
        src, dst = [], []
        for a, b, o, s in zip(lo, hi, self.origin, self.data.shape):
            p, q = max(a, o), min(b, o + s - 1)
            if p > q:
                return out
            src.append(slice(p - o, q - o + 1))
            dst.append(slice(p - a, q - a + 1))
        out[tuple(dst)] = self.data[tuple(src)]
        return out

    def trimmed(self) -> "Grid":
        """Smallest box holding every nonzero value."""
        nz = np.argwhere(self.data != 0)
        if nz.size == 0:
            return Grid(self.data[tuple(slice(0, 0) for _ in range(self.dim))], self.origin, self.tag)
        a, b = nz.min(axis=0), nz.max(axis=0)
        sl = tuple(slice(int(x), int(y) + 1) for x, y in zip(a, b))
        return Grid(self.data[sl], tuple(o + int(x) for o, x in zip(self.origin, a)), self.tag)

    def points(self) -> np.ndarray:
        """Integer coordinates of every cell, shape ``(*data.shape, d)``."""
        idx = np.indices(self.data.shape)
        return np.stack([idx[i] + self.origin[i] for i in range(self.dim)], axis=-1)


def _taps(t: LaurentPoly, exact: bool, conj: bool):
    """``[(k, c)]`` for the rational core of ``t`` and the core's surd."""
    if any(t.par):
        raise BankInvalid("filters must have integer frequencies")
    out = []
    for k, g in t.coeffs.items():
        if conj:
            g = g.conjugate()
        if exact:
            c = g.re if g.im == 0 else g
        else:
            c = complex(g)
        out.append((k, c))
    return out, t.surd


def _zeros(shape, exact: bool, cplx: bool):
    if exact:
        z = np.empty(shape, dtype=object)
        z.fill(Fraction(0))
        return z
    return np.zeros(shape, dtype=complex if cplx else float)


def correlate(x: Grid, taps, exact: bool) -> Grid:
    """``z[p] = sum_t c_t x[p + t]``."""
    ks = [k for k, _ in taps]
    d = x.dim
    lo = tuple(x.lo[i] - max(k[i] for k in ks) for i in range(d))
    hi = tuple(x.hi[i] - min(k[i] for k in ks) for i in range(d))
    cplx = (not exact) and (np.iscomplexobj(x.data) or any(isinstance(c, complex) and c.imag for _, c in taps))
    z = _zeros(tuple(b - a + 1 for a, b in zip(lo, hi)), exact, cplx)
    for k, c in taps:
        if not exact and not cplx:
            c = c.real
        sl = tuple(slice(x.origin[i] - k[i] - lo[i], x.origin[i] - k[i] - lo[i] + x.data.shape[i])
                   for i in range(d))
        z[sl] += x.data * c
    return Grid(z, lo, x.tag)


def convolve(u: Grid, taps, exact: bool) -> Grid:
    """``x[n] = sum_t c_t u[n - t]``."""
    neg = [(tuple(-v for v in k), c) for k, c in taps]
    return correlate(u, neg, exact)


def _box_image(lo, hi, A) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    corners = [matvec(A, c) for c in itertools.product(*zip(lo, hi))]
    d = len(lo)
    return (tuple(min(c[i] for c in corners) for i in range(d)),
            tuple(max(c[i] for c in corners) for i in range(d)))


def downsample(z: Grid, ctx: DilationContext) -> Grid:
    """``y[k] = z[M k]``."""
    M, d = ctx.M, ctx.dim
    corners = [ctx.minv(c) for c in itertools.product(*zip(z.lo, z.hi))]
    lo = tuple(math.floor(min(c[i] for c in corners)) for i in range(d))
    hi = tuple(math.ceil(max(c[i] for c in corners)) for i in range(d))
    shape = tuple(b - a + 1 for a, b in zip(lo, hi))
    ks = np.indices(shape).reshape(d, -1) + np.array(lo).reshape(d, 1)
    Mk = np.array(M) @ ks
    rel = Mk - np.array(z.origin).reshape(d, 1)
    inside = np.all((rel >= 0) & (rel < np.array(z.data.shape).reshape(d, 1)), axis=0)
    out = _zeros(int(np.prod(shape)), z.data.dtype == object, np.iscomplexobj(z.data))
    if z.data.dtype != object:
        out = out.astype(z.data.dtype)
    out[inside] = z.data[tuple(rel[:, inside])]
    return Grid(out.reshape(shape), lo, z.tag)


def upsample(y: Grid, ctx: DilationContext) -> Grid:
    """``u[M k] = y[k]``, zero elsewhere."""
    d = ctx.dim
    lo, hi = _box_image(y.lo, y.hi, ctx.M)
    shape = tuple(b - a + 1 for a, b in zip(lo, hi))
    out = _zeros(shape, y.data.dtype == object, np.iscomplexobj(y.data))
    if y.data.dtype != object:
        out = out.astype(y.data.dtype)
    ks = y.points().reshape(-1, d).T
    Mk = np.array(ctx.M) @ ks - np.array(lo).reshape(d, 1)
    out[tuple(Mk)] = y.data.reshape(-1)
    return Grid(out, lo, y.tag)


def add_grids(grids: Sequence[Grid], exact: bool) -> Grid:
    d = grids[0].dim
    lo = tuple(min(g.lo[i] for g in grids) for i in range(d))
    hi = tuple(max(g.hi[i] for g in grids) for i in range(d))
    tags = {g.tag for g in grids}
    if len(tags) != 1:
        raise VerificationFailed(f"cannot add grids with tags {sorted(tags)}")
    acc = None
    for g in grids:
        v = g.on_box(lo, hi)
        acc = v if acc is None else acc + v
    return Grid(acc, lo, grids[0].tag)


def _retag(g: Grid, extra: int, exact: bool) -> Grid:
    """Multiply by ``sqrt(extra)``; exact mode folds square factors into the data."""
    if not exact:
        return Grid(g.data * math.sqrt(extra * g.tag), g.origin, 1)
    f, r = split_square(g.tag * extra)
    data = g.data * f if f != 1 else g.data
    return Grid(data, g.origin, r)


# ---------------------------------------------------------------------------
# analysis / synthesis

@dataclass
class CoefficientPyramid:
    """``approx`` at the coarsest level and ``details[j][nu-1]`` for ``j = 0..J-1``."""

    levels: int
    approx: Grid
    details: List[List[Grid]] = field(default_factory=list)
    exact: bool = True
    fingerprint: str = ""


def _as_input(x, exact: bool) -> Grid:
    if isinstance(x, Grid):
        g = x
    else:
        g = Grid.from_array(x)
    if exact:
        data = np.empty(g.data.shape, dtype=object)
        flat = g.data.reshape(-1)
        out = data.reshape(-1)
        for i, v in enumerate(flat):
            if isinstance(v, (GaussianRational, Fraction)):
                out[i] = v
            elif isinstance(v, (float, np.floating)):
                out[i] = Fraction(float(v))
            else:
                out[i] = Fraction(int(v))
        return Grid(data, g.origin, g.tag)
    arr = np.asarray(g.data, dtype=complex if np.iscomplexobj(g.data) else float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteSamples("input contains non-finite values")
    return Grid(arr, g.origin, 1)


def _check_bank(bank: FilterBank):
    if len(bank.masks) != bank.m + 1 or len(bank.duals) != bank.m + 1:
        raise BankInvalid("bank must hold m + 1 masks and duals")


def analyze(x, bank: FilterBank, levels: int = 1, exact: bool = True) -> CoefficientPyramid:
    """Frame-like analysis down ``levels`` times (zero extension outside the input)."""
    _check_bank(bank)
    ctx = bank.ctx
    a = _as_input(x, exact)
    if a.dim != ctx.dim:
        raise ContextMismatch("grid dimension differs from the bank")
    filt = [_taps(t, exact, conj=True) for t in bank.duals]
    details = []
    for _ in range(levels):
        outs = []
        for taps, surd in filt:
            if not taps:
                outs.append(Grid(_zeros((1,) * ctx.dim, exact, False), (0,) * ctx.dim, a.tag))
                continue
            y = downsample(correlate(a, taps, exact), ctx)
            outs.append(_retag(y, ctx.m * surd, exact))
        details.append(outs[1:])
        a = outs[0]
    return CoefficientPyramid(levels, a, details, exact, bank.fingerprint())


def synthesize(pyr: CoefficientPyramid, bank: FilterBank) -> Grid:
    """Inverse of :func:`analyze`; exact mode reproduces the input exactly."""
    _check_bank(bank)
    if pyr.fingerprint and pyr.fingerprint != bank.fingerprint():
        raise ContextMismatch("pyramid was produced by a different bank")
    ctx = bank.ctx
    exact = pyr.exact
    filt = [_taps(t, exact, conj=False) for t in bank.masks]
    a = pyr.approx
    for j in reversed(range(pyr.levels)):
        parts = []
        for (taps, surd), y in zip(filt, [a] + pyr.details[j]):
            if not taps:
                continue
            u = convolve(upsample(y, ctx), taps, exact)
            parts.append(_retag(u, ctx.m * surd, exact))
        a = add_grids(parts, exact)
    return a


def max_abs_diff(a: Grid, b: Grid) -> float:
    d = a.dim
    lo = tuple(min(a.lo[i], b.lo[i]) for i in range(d))
    hi = tuple(max(a.hi[i], b.hi[i]) for i in range(d))
    diff = a.on_box(lo, hi) - b.on_box(lo, hi)
    if diff.dtype == object:
        return max((abs(complex(v)) for v in diff.reshape(-1)), default=0.0)
    return float(np.max(np.abs(diff), initial=0.0))


def grids_equal(a: Grid, b: Grid) -> bool:
    """Exact equality with zero extension (tags must agree)."""
    if a.tag != b.tag:
        return False
    d = a.dim
    lo = tuple(min(a.lo[i], b.lo[i]) for i in range(d))
    hi = tuple(max(a.hi[i], b.hi[i]) for i in range(d))
    return all(x == y for x, y in zip(a.on_box(lo, hi).reshape(-1), b.on_box(lo, hi).reshape(-1)))


# ---------------------------------------------------------------------------
# cascade and refinable function values

@dataclass
class CascadeGrid:
    """Level-``j`` values; ``grid`` index ``alpha`` sits at the point ``-M^{-j} alpha``."""

    level: int
    grid: Grid
    ctx: DilationContext

    def mass(self):
        s = sum(self.grid.data.reshape(-1).tolist(), Fraction(0) if self.grid.data.dtype == object else 0.0)
        return s / self.ctx.m ** self.level

    def coordinates(self) -> np.ndarray:
        """Real coordinates of all cells, shape ``(*shape, d)``."""
        Minv_j = np.linalg.matrix_power(np.linalg.inv(np.array(self.ctx.M, dtype=float)), self.level)
        pts = self.grid.points().astype(float)
        return -pts @ Minv_j.T


def subdivide(c: Grid, m0: LaurentPoly, ctx: DilationContext, exact: bool) -> Grid:
    """``c'_gamma = m sum_alpha c_alpha h_{gamma - M alpha}``."""
    taps, surd = _taps(m0, exact, conj=False)
    if surd != 1:
        raise BankInvalid("refinable masks must be rational")
    taps = [(k, v * ctx.m) for k, v in taps]
    return convolve(upsample(c, ctx), taps, exact)


def cascade(m0: LaurentPoly, ctx: DilationContext, levels: int, exact: bool = False) -> CascadeGrid:
    """Subdivision from a delta; total mass ``sum c m^{-j}`` stays 1."""
    d = ctx.dim
    if exact:
        data = np.empty((1,) * d, dtype=object)
        data.fill(Fraction(1))
    else:
        data = np.ones((1,) * d)
    g = Grid(data, (0,) * d)
    for _ in range(levels):
        g = subdivide(g, m0, ctx, exact)
    return CascadeGrid(levels, g, ctx)


def integer_values(m0: LaurentPoly, ctx: DilationContext) -> Grid:
    """``phi`` at integer points, indexed so that entry ``q`` is ``phi(-q)``.

    Solves ``v_q = m sum_n h_n v_{M q - n}`` for the eigenvalue nearest 1, normalized
    to total mass 1.
    """
    d = ctx.dim
    supp = m0.support
    r = max(max(abs(x) for x in k) for k in supp)
    Minv = np.linalg.inv(np.array(ctx.M, dtype=float))
    P, tot = np.eye(d), 0.0
    for _ in range(200):
        P = P @ Minv
        tot += np.abs(P).sum(axis=1).max()
    R = int(math.ceil(r * tot)) + 1
    box = list(itertools.product(range(-R, R + 1), repeat=d))
    index = {q: i for i, q in enumerate(box)}
    A = np.zeros((len(box), len(box)))
    h = m0.float_coeffs()
    for q in box:
        Mq = matvec(ctx.M, q)
        for n, c in h.items():
            p = tuple(a - b for a, b in zip(Mq, n))
            if p in index:
                A[index[q], index[p]] += ctx.m * c.real
    w, V = np.linalg.eig(A)
    i = int(np.argmin(np.abs(w - 1)))
    if abs(w[i] - 1) > 1e-8:
        raise VerificationFailed("refinement operator has no eigenvalue 1 on integer points")
    v = np.real(V[:, i])
    v = v / v.sum()
    data = v.reshape((2 * R + 1,) * d)
    return Grid(data, (-R,) * d).trimmed()


def refinable_values(m0: LaurentPoly, ctx: DilationContext, level: int) -> CascadeGrid:
    """``phi`` on ``M^{-level} Z^d`` via subdivision of its integer values."""
    v = integer_values(m0, ctx)
    c = cascade(m0, ctx, level, exact=False).grid
    g = correlate_full(c, v)
    return CascadeGrid(level, g, ctx)


def correlate_full(c: Grid, v: Grid) -> Grid:
    """``(c * (v upsampled by M^level))``: values of ``phi`` at level points.

    ``phi(-M^{-j} alpha) = sum_beta v_beta c_{alpha - M^j beta}``; callers pass ``v`` already
    scattered onto the level lattice via :func:`upsample_power`.
    """
    taps = [(tuple(int(x) for x in k), float(val))
            for k, val in zip(v.points().reshape(-1, v.dim), v.data.reshape(-1)) if val != 0]
    return convolve(c, taps, exact=False)


def upsample_power(g: Grid, ctx: DilationContext, j: int) -> Grid:
    for _ in range(j):
        g = upsample(g, ctx)
    return g


# ---------------------------------------------------------------------------
# approximation experiment

def _quasi_interpolant(f: Callable, m0: LaurentPoly, ctx: DilationContext, j: int, L: int,
                       box: float, v: Grid) -> Tuple[Grid, np.ndarray]:
    """``P_j f = sum_k f(-M^{-j} k) phi(M^j x + k)`` on the level-``L`` lattice."""
    d = ctx.dim
    Mj = np.linalg.matrix_power(np.array(ctx.M, dtype=float), j)
    # sample indices k with -M^{-j} k inside the box
    lo, hi = _box_image((-1,) * d, (1,) * d, [[int(round(x)) for x in row] for row in Mj * box])
    samp = Grid(np.zeros(tuple(b - a + 1 for a, b in zip(lo, hi))), lo)
    pts = samp.points().reshape(-1, d).astype(float)
    xs = -pts @ np.linalg.inv(Mj).T
    vals = f(xs)
    vals = np.where(np.all(np.abs(xs) <= box, axis=1), vals, 0.0)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSamples("f returned non-finite samples")
    samp = Grid(vals.reshape(samp.data.shape), lo)
    g = samp
    for _ in range(L - j):
        g = subdivide(g, m0, ctx, exact=False)
    # phi at level points: convolve with integer values scattered onto the level lattice
    vL = upsample_power(v, ctx, L - j)
    taps = [(tuple(int(x) for x in k), float(val))
            for k, val in zip(vL.points().reshape(-1, d), vL.data.reshape(-1)) if val != 0]
    P = convolve(g, taps, exact=False)
    ML = np.linalg.matrix_power(np.array(ctx.M, dtype=float), L)
    coords = -P.points().reshape(-1, d).astype(float) @ np.linalg.inv(ML).T
    return P, coords


@dataclass
class ApproxResult:
    levels: List[int]
    errors: List[float]
    slope: float
    expected: float

    @property
    def ratios(self) -> List[float]:
        return [b / a for a, b in zip(self.errors, self.errors[1:])]

    def rel_error(self) -> float:
        return abs(self.slope - self.expected) / abs(self.expected)


def approx_order_experiment(bank_or_mask, f: Callable, levels: Sequence[int], n: int,
                            box: float = 4.0, inner: float = 2.0,
                            fine_extra: int = 2) -> ApproxResult:
    """Fit ``log E_j`` against ``j`` for the quasi-interpolant with point samples.

    The dual side is taken to be a delta (trivial dual), so ``<f, dual phi_{jk}>`` reduces
    to samples of ``f``. ``E_j`` is the grid ``L2`` error on ``|x|_inf <= inner`` at level
    ``max(levels) + fine_extra``. The expected slope is ``-n log|lambda_min|``.
    """
    if isinstance(bank_or_mask, FilterBank):
        m0, ctx = bank_or_mask.masks[0], bank_or_mask.ctx
        if bank_or_mask.duals[0] != LaurentPoly.const(1, ctx.dim):
            raise BankInvalid("the sampling experiment needs the trivial dual")
    else:
        m0, ctx = bank_or_mask
    L = max(levels) + fine_extra
    v = integer_values(m0, ctx)
    errs = []
    for j in levels:
        P, xs = _quasi_interpolant(f, m0, ctx, j, L, box, v)
        mask = np.all(np.abs(xs) <= inner, axis=1)
        e = f(xs[mask]) - P.data.reshape(-1)[mask].real
        errs.append(float(np.sqrt(np.sum(e ** 2) / ctx.m ** L)))
    if not all(e > 0 and np.isfinite(e) for e in errs):
        raise NonFiniteSamples("error sequence is not positive and finite")
    slope = float(np.polyfit(np.array(levels, dtype=float), np.log(errs), 1)[0])
    lam = float(np.min(np.abs(np.linalg.eigvals(np.array(ctx.M, dtype=float)))))
    return ApproxResult(list(levels), errs, slope, -n * math.log(lam))
