"""Exact multivariate Laurent polynomials with half-integer frequency offsets.

A trigonometric polynomial ``t(xi) = sqrt(r) * sum_k h_k exp(2 pi i (k + sigma, xi))``
is stored with

* Gaussian-rational coefficients ``h_k`` kept as Gaussian-integer numerators over
  one common positive denominator,
* an offset ``sigma`` in ``{0, 1/2}^d``,
* a squarefree integer ``r >= 1`` (the *surd*) so that factors such as ``1/sqrt(m)``
  stay exact.

Internally every frequency ``k + sigma`` is kept doubled, so that all arithmetic
on frequencies is integer arithmetic.
"""
from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

from .errors import DimMismatch, IrrationalValue, OffsetMismatch, SurdMismatch

Key = Tuple[int, ...]


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts.

    Examples
    --------
    >>> GaussianRational(1, 2) * GaussianRational(0, 1)
    GaussianRational(-2, 1)
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + Fraction(im)
        elif isinstance(re, complex):
            re, im = Fraction(re.real), Fraction(re.imag) + Fraction(im)
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return GaussianRational(x)

    @staticmethod
    def parse(re: str, im: str = "0") -> "GaussianRational":
        return GaussianRational(Fraction(re), Fraction(im))

    def __add__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = GaussianRational.coerce(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussianRational.coerce(o) - self

    def __mul__(self, o):
        o = GaussianRational.coerce(o)
        if not self.im and not o.im:
            return GaussianRational(self.re * o.re)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = GaussianRational.coerce(o)
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("division by zero")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, o):
        return GaussianRational.coerce(o) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, k: int):
        out = GaussianRational(1)
        base = self if k >= 0 else 1 / self
        for _ in range(abs(k)):
            out = out * base
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, float, complex, GaussianRational)):
            o = GaussianRational.coerce(o)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


# ---------------------------------------------------------------------------
# multi-index helpers

def degree(alpha: Sequence[int]) -> int:
    """Total order ``[alpha]``."""
    return sum(alpha)


def delta_n(d: int, n: int) -> list:
    """All multi-indices with ``[alpha] < n`` in graded-lex order."""
    out = []
    for total in range(n):
        level = [a for a in itertools.product(range(total + 1), repeat=d) if sum(a) == total]
        level.sort(reverse=True)
        out.extend(level)
    return out


def delta_e_n(d: int, n: int) -> list:
    """Even-order part of :func:`delta_n`."""
    return [a for a in delta_n(d, n) if sum(a) % 2 == 0]


def exact_order(d: int, n: int) -> list:
    """Multi-indices with ``[alpha] == n`` in graded-lex order."""
    level = [a for a in itertools.product(range(n + 1), repeat=d) if sum(a) == n]
    level.sort(reverse=True)
    return level


def mi_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mi_binom(b: Sequence[int], a: Sequence[int]) -> int:
    out = 1
    for x, y in zip(b, a):
        out *= math.comb(x, y)
    return out


def mi_sub(a, b) -> Key:
    return tuple(x - y for x, y in zip(a, b))


def mi_pow(v: Sequence, beta: Sequence[int]):
    """``v^beta`` for a vector of exact numbers (empty product is 1)."""
    out = Fraction(1)
    for x, e in zip(v, beta):
        if e:
            out = out * x ** e
    return out


def odd_set(alpha: Sequence[int]) -> Tuple[int, ...]:
    return tuple(i for i, a in enumerate(alpha) if a % 2)


def sub_indices(beta: Sequence[int]) -> Iterator[Key]:
    """All ``alpha <= beta`` componentwise."""
    return itertools.product(*[range(b + 1) for b in beta])


# ---------------------------------------------------------------------------
# squarefree bookkeeping for the sqrt scale

def split_square(n: int) -> Tuple[int, int]:
    """Return ``(f, r)`` with ``n == f*f*r`` and ``r`` squarefree."""
    if n < 1:
        raise ValueError("surd must be a positive integer")
    f, r, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            r *= p
        p += 1
    return f, r * n


def _key(k, d=None) -> Key:
    if isinstance(k, int):
        return (k,)
    return tuple(int(x) for x in k)


def _half2(v) -> Key:
    """Double a half-integer vector, checking representability."""
    out = []
    for x in v:
        y = Fraction(x) * 2
        if y.denominator != 1:
            raise ValueError(f"{x} is not a half-integer")
        out.append(int(y))
    return tuple(out)


class LaurentPoly:
    """Exact trigonometric polynomial of (possibly) semi-integer degree.

    Parameters
    ----------
    coeffs : mapping
        ``k -> h_k`` with integer keys (tuples, or ints when ``d == 1``).
    sigma : sequence, optional
        Offset in ``{0, 1/2}^d``; defaults to zero.
    dim : int, optional
        Needed only for the zero polynomial without ``sigma``.
    surd : int
        The represented function is ``sqrt(surd)`` times the coefficient sum.

    Examples
    --------
    >>> t = LaurentPoly({(0,): 1, (1,): -1})
    >>> t.coeffs[(1,)]
    GaussianRational(-1, 0)
    """

    __slots__ = ("dim", "par", "terms", "den", "surd", "_real")

    def __init__(self, coeffs: Mapping = None, sigma=None, dim: int = None, surd: int = 1):
        coeffs = dict(coeffs or {})
        if dim is None:
            if sigma is not None:
                dim = len(sigma)
            elif coeffs:
                dim = len(_key(next(iter(coeffs))))
            else:
                raise ValueError("dimension of the zero polynomial is unknown")
        par = _half2(sigma) if sigma is not None else (0,) * dim
        if len(par) != dim or any(p not in (0, 1) for p in par):
            raise ValueError("sigma must lie in {0, 1/2}^d")
        vals = {}
        for k, v in coeffs.items():
            key = _key(k)
            if len(key) != dim:
                raise DimMismatch("key dimension differs from poly dimension")
            g = GaussianRational.coerce(v)
            if g:
                vals[tuple(2 * x + p for x, p in zip(key, par))] = g
        den = 1
        for g in vals.values():
            den = den * g.re.denominator // math.gcd(den, g.re.denominator)
            den = den * g.im.denominator // math.gcd(den, g.im.denominator)
        terms = {f: (int(g.re * den), int(g.im * den)) for f, g in vals.items()}
        f, r = split_square(surd)
        if f != 1:
            terms = {k: (a * f, b * f) for k, (a, b) in terms.items()}
        self._set(dim, par, terms, den, r)

    def _set(self, dim, par, terms, den, surd):
        terms = {k: v for k, v in terms.items() if v[0] or v[1]}
        g = den
        for a, b in terms.values():
            if g == 1:
                break
            g = math.gcd(g, a, b)
        if g != 1:
            terms = {k: (a // g, b // g) for k, (a, b) in terms.items()}
            den //= g
        if not terms:
            den = 1
        self.dim = dim
        self.par = par
        self.terms = terms
        self.den = den
        self.surd = surd
        self._real = all(b == 0 for _, b in terms.values())

    @classmethod
    def _raw(cls, dim, par, terms, den, surd=1) -> "LaurentPoly":
        obj = cls.__new__(cls)
        f, r = split_square(surd)
        if f != 1:
            terms = {k: (a * f, b * f) for k, (a, b) in terms.items()}
        if den < 0:
            den = -den
            terms = {k: (-a, -b) for k, (a, b) in terms.items()}
        obj._set(dim, tuple(par), terms, den, r)
        return obj

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, dim: int, sigma=None) -> "LaurentPoly":
        return cls({}, sigma=sigma, dim=dim)

    @classmethod
    def const(cls, c, dim: int) -> "LaurentPoly":
        return cls({(0,) * dim: c}, dim=dim)

    @classmethod
    def monomial(cls, k, dim: int = None, c=1, sigma=None) -> "LaurentPoly":
        k = _key(k)
        return cls({k: c}, sigma=sigma, dim=dim or len(k))

    @classmethod
    def from_frequencies(cls, freqs: Mapping, dim: int = None) -> "LaurentPoly":
        """Build from a map ``frequency -> coefficient`` with half-integer frequencies."""
        items = [(_half2(_key(f) if isinstance(f, int) else f), v) for f, v in freqs.items()]
        if dim is None:
            if not items:
                raise ValueError("dimension of the zero polynomial is unknown")
            dim = len(items[0][0])
        par = None
        coeffs = {}
        for f2, v in items:
            p = tuple(x % 2 for x in f2)
            if par is None:
                par = p
            elif p != par:
                raise OffsetMismatch("frequencies of mixed offset classes")
            coeffs[tuple((x - q) // 2 for x, q in zip(f2, p))] = v
        sigma = tuple(Fraction(q, 2) for q in (par or (0,) * dim))
        return cls(coeffs, sigma=sigma, dim=dim)

    # -- views ---------------------------------------------------------------
    @property
    def sigma(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(p, 2) for p in self.par)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_real(self) -> bool:
        """True when all stored coefficients are real."""
        return self._real

    def _k(self, f2: Key) -> Key:
        return tuple((x - p) // 2 for x, p in zip(f2, self.par))

    @property
    def coeffs(self) -> Dict[Key, GaussianRational]:
        """Coefficients ``k -> h_k`` of the rational core (excluding ``sqrt(surd)``)."""
        return {self._k(f): GaussianRational(Fraction(a, self.den), Fraction(b, self.den))
                for f, (a, b) in self.sorted_terms()}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda it: (sum(it[0]), it[0]))

    def coefficient(self, k) -> GaussianRational:
        f = tuple(2 * x + p for x, p in zip(_key(k), self.par))
        a, b = self.terms.get(f, (0, 0))
        return GaussianRational(Fraction(a, self.den), Fraction(b, self.den))

    def frequencies(self) -> Dict[Tuple[Fraction, ...], GaussianRational]:
        return {tuple(Fraction(x, 2) for x in f): GaussianRational(Fraction(a, self.den), Fraction(b, self.den))
                for f, (a, b) in self.sorted_terms()}

    @property
    def support(self) -> list:
        return [self._k(f) for f, _ in self.sorted_terms()]

    def __len__(self):
        return len(self.terms)

    def bounding_box(self) -> Tuple[Key, Key]:
        ks = self.support
        return (tuple(min(k[i] for k in ks) for i in range(self.dim)),
                tuple(max(k[i] for k in ks) for i in range(self.dim)))

    # -- comparisons ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (int, Fraction, GaussianRational)):
                return self == LaurentPoly.const(other, self.dim)
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        return (self.par == other.par and self.surd == other.surd
                and self.den == other.den and self.terms == other.terms)

    def __hash__(self):
        return hash((self.dim, self.par, self.surd, self.den, frozenset(self.terms.items())))

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: "LaurentPoly"):
        if self.dim != other.dim:
            raise DimMismatch(f"dimensions {self.dim} and {other.dim}")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other, self.dim)
        self._check(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self.par != other.par:
            raise OffsetMismatch(f"offsets {self.sigma} and {other.sigma} differ")
        if self.surd != other.surd:
            raise SurdMismatch(f"cannot add sqrt({self.surd})- and sqrt({other.surd})-scaled polys")
        da, db = self.den, other.den
        g = math.gcd(da, db)
        fa, fb = db // g, da // g
        terms = {k: (a * fa, b * fa) for k, (a, b) in self.terms.items()}
        for k, (a, b) in other.terms.items():
            x, y = terms.get(k, (0, 0))
            terms[k] = (x + a * fb, y + b * fb)
        return LaurentPoly._raw(self.dim, self.par, terms, da * fa, self.surd)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.dim, self.par, {k: (-a, -b) for k, (a, b) in self.terms.items()},
                                self.den, self.surd)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other, self.dim)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentPoly":
        """Multiply by an exact Gaussian-rational scalar."""
        c = GaussianRational.coerce(c)
        p, q = c.re.numerator * c.im.denominator, c.im.numerator * c.re.denominator
        cd = c.re.denominator * c.im.denominator
        terms = {k: (a * p - b * q, a * q + b * p) for k, (a, b) in self.terms.items()}
        return LaurentPoly._raw(self.dim, self.par, terms, self.den * cd, self.surd)

    def with_surd(self, surd: int) -> "LaurentPoly":
        """Multiply by ``sqrt(surd)`` exactly."""
        return LaurentPoly._raw(self.dim, self.par, dict(self.terms), self.den, self.surd * surd)

    def div_sqrt(self, m: int) -> "LaurentPoly":
        """Multiply by ``1/sqrt(m)`` exactly."""
        return LaurentPoly._raw(self.dim, self.par, dict(self.terms), self.den * m, self.surd * m)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        return poly_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int):
        out = LaurentPoly.const(1, self.dim)
        for _ in range(e):
            out = out * self
        return out

    # -- evaluation ------------------------------------------------------------
    def core_moment(self, beta: Sequence[int]) -> GaussianRational:
        """``sum_k h_k (k+sigma)^beta`` of the rational core (ignores the surd)."""
        sa = sb = 0
        for f, (a, b) in self.terms.items():
            w = 1
            for x, e in zip(f, beta):
                if e:
                    w *= x ** e
            sa += a * w
            sb += b * w
        scale = self.den * 2 ** sum(beta)
        return GaussianRational(Fraction(sa, scale), Fraction(sb, scale))

    def __call__(self, xi) -> complex:
        """Evaluate numerically at a real frequency vector."""
        xi = [xi] if isinstance(xi, (int, float, Fraction)) else list(xi)
        s = 0j
        for f, (a, b) in self.terms.items():
            ph = sum(x * float(y) for x, y in zip(f, xi)) * math.pi
            s += complex(a, b) * cmath.exp(1j * ph)
        return s * math.sqrt(self.surd) / self.den

    def float_coeffs(self) -> Dict[Key, complex]:
        s = math.sqrt(self.surd) / self.den
        return {self._k(f): complex(a, b) * s for f, (a, b) in self.terms.items()}

    def __repr__(self):
        body = " + ".join(f"({g})e{list(k)}" for k, g in self.coeffs.items()) or "0"
        extra = f", sigma={tuple(str(s) for s in self.sigma)}" if any(self.par) else ""
        if self.surd != 1:
            extra += f", sqrt({self.surd})"
        return f"LaurentPoly[{self.dim}]({body}{extra})"


def poly_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact product; offsets add with the carry folded into the keys."""
    a._check(b)
    if a.is_zero or b.is_zero:
        par = tuple((x + y) % 2 for x, y in zip(a.par, b.par))
        return LaurentPoly._raw(a.dim, par, {}, 1)
    par = tuple((x + y) % 2 for x, y in zip(a.par, b.par))
    out: Dict[Key, list] = {}
    bt = list(b.terms.items())
    if a._real and b._real:
        if a.dim == 1:
            for (f,), (x, _) in a.terms.items():
                for (g,), (y, _) in bt:
                    k = (f + g,)
                    out[k] = out.get(k, 0) + x * y
        elif a.dim == 2:
            for (f1, f2), (x, _) in a.terms.items():
                for (g1, g2), (y, _) in bt:
                    k = (f1 + g1, f2 + g2)
                    out[k] = out.get(k, 0) + x * y
        else:
            for f, (x, _) in a.terms.items():
                for g, (y, _) in bt:
                    k = tuple(p + q for p, q in zip(f, g))
                    out[k] = out.get(k, 0) + x * y
        terms = {k: (v, 0) for k, v in out.items()}
    else:
        terms = {}
        for f, (x1, y1) in a.terms.items():
            for g, (x2, y2) in bt:
                k = tuple(p + q for p, q in zip(f, g))
                r, i = terms.get(k, (0, 0))
                terms[k] = (r + x1 * x2 - y1 * y2, i + x1 * y2 + y1 * x2)
    return LaurentPoly._raw(a.dim, par, terms, a.den * b.den, a.surd * b.surd)


def normalized_derivative(t: LaurentPoly, beta: Sequence[int]) -> GaussianRational:
    """``d_beta(t) = D^beta t(0) / (2 pi i)^[beta] = sum_k h_k (k + sigma)^beta``.

    Raises
    ------
    IrrationalValue
        If ``t`` carries an irrational ``sqrt`` scale.
    """
    if t.surd != 1 and not t.is_zero:
        raise IrrationalValue(f"value carries a factor sqrt({t.surd}); use core_moment")
    return t.core_moment(beta)


def substitute(t: LaurentPoly, A) -> LaurentPoly:
    """``xi -> t(A^* xi)``: the coefficient at ``k + sigma`` moves to ``A (k + sigma)``."""
    A = [list(map(int, row)) for row in A]
    if len(A) != t.dim:
        raise DimMismatch("matrix size differs from poly dimension")
    terms = {}
    for f, v in t.terms.items():
        terms[tuple(sum(r[j] * f[j] for j in range(t.dim)) for r in A)] = v
    par = tuple(sum(r[j] * t.par[j] for j in range(t.dim)) % 2 for r in A)
    return LaurentPoly._raw(t.dim, par, terms, t.den, t.surd)


def conj_reflect(t: LaurentPoly) -> LaurentPoly:
    """``xi -> conj(t(xi))``: ``h_k`` at ``k+sigma`` becomes ``conj(h_k)`` at ``-(k+sigma)``."""
    terms = {tuple(-x for x in f): (a, -b) for f, (a, b) in t.terms.items()}
    return LaurentPoly._raw(t.dim, t.par, terms, t.den, t.surd)


def reflect(t: LaurentPoly) -> LaurentPoly:
    """``xi -> t(-xi)``."""
    terms = {tuple(-x for x in f): v for f, v in t.terms.items()}
    return LaurentPoly._raw(t.dim, t.par, terms, t.den, t.surd)


def modulate(t: LaurentPoly, a) -> LaurentPoly:
    """Multiply by ``exp(2 pi i (a, xi))`` for a half-integer vector ``a``."""
    a2 = _half2([a] if isinstance(a, (int, Fraction)) else a)
    if len(a2) != t.dim:
        raise DimMismatch("shift dimension differs from poly dimension")
    terms = {tuple(x + y for x, y in zip(f, a2)): v for f, v in t.terms.items()}
    par = tuple((p + y) % 2 for p, y in zip(t.par, a2))
    return LaurentPoly._raw(t.dim, par, terms, t.den, t.surd)


def poly_sum(polys: Iterable[LaurentPoly], dim: int) -> LaurentPoly:
    return reduce(lambda x, y: x + y, polys, LaurentPoly.zero(dim))


def embed(t: LaurentPoly, axis: int, dim: int) -> LaurentPoly:
    """Lift a univariate polynomial ``t(u)`` to ``xi -> t(xi_axis)`` in ``dim`` variables."""
    if t.dim != 1:
        raise DimMismatch("embed expects a univariate polynomial")
    terms = {}
    for (f,), v in t.terms.items():
        key = [0] * dim
        key[axis] = f
        terms[tuple(key)] = v
    par = [0] * dim
    par[axis] = t.par[0]
    return LaurentPoly._raw(dim, par, terms, t.den, t.surd)
