"""Multivariate polynomials with complex or exact integer coefficients.

Polynomials are stored sparsely as ``{MultiIndex: coefficient}``.  Integer
polynomials keep Python ``int`` coefficients so that certificates built from
them can be re-evaluated exactly or in arbitrary precision.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Iterator, Mapping, Sequence

import mpmath
import numpy as np


class MultiIndex(tuple):
    """Exponent vector ``alpha = (alpha_1, ..., alpha_m)`` with exact helpers."""

    def __new__(cls, exponents: Iterable[int]):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in multi-index {exps}")
        return super().__new__(cls, exps)

    @property
    def order(self) -> int:
        """Total degree ``|alpha|``."""
        return sum(self)

    def factorial(self) -> int:
        return math.prod(math.factorial(a) for a in self)

    def binom(self, beta: Sequence[int]) -> int:
        """``alpha! / ((alpha - beta)! beta!)``, zero unless ``beta <= alpha``."""
        if len(beta) != len(self):
            raise ValueError("multi-index length mismatch")
        return math.prod(math.comb(a, b) for a, b in zip(self, beta))

    def shift(self, k: int) -> "MultiIndex":
        """``alpha + k`` applied to every component."""
        return MultiIndex(a + k for a in self)

    def dominates(self, beta: Sequence[int]) -> bool:
        return all(a >= b for a, b in zip(self, beta))

    def __add__(self, other):  # componentwise, not tuple concatenation
        return MultiIndex(a + b for a, b in zip(self, other, strict=True))

    def __sub__(self, other):
        return MultiIndex(a - b for a, b in zip(self, other, strict=True))


def multi_indices_of_order(nvars: int, order: int) -> Iterator[MultiIndex]:
    """All ``alpha`` with ``|alpha| == order``, in reverse-lexicographic order."""
    if nvars == 0:
        if order == 0:
            yield MultiIndex(())
        return
    if nvars == 1:
        yield MultiIndex((order,))
        return
    for first in range(order, -1, -1):
        for rest in multi_indices_of_order(nvars - 1, order - first):
            yield MultiIndex((first,) + tuple(rest))


def multi_indices(nvars: int, degree: int) -> list[MultiIndex]:
    """All ``alpha`` with ``|alpha| <= degree``, graded by total degree."""
    return [a for d in range(degree + 1) for a in multi_indices_of_order(nvars, d)]


def monomial_count(N: int, n: int) -> int:
    """Number of monomials of total degree ``<= N`` in ``n`` variables."""
    if N < 0 or n < 0:
        raise ValueError("N and n must be nonnegative")
    return math.comb(N + n, n)


def _is_exact(x) -> bool:
    return isinstance(x, (Integral, Rational)) and not isinstance(x, bool)


class Poly:
    """Sparse polynomial in ``nvars`` variables.

    ``integer=True`` marks exact integer coefficients; otherwise coefficients
    are complex doubles.
    """

    __slots__ = ("nvars", "terms", "integer")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None,
                 integer: bool | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        terms = dict(terms or {})
        if integer is None:
            integer = all(isinstance(c, Integral) for c in terms.values())
        clean: dict[MultiIndex, object] = {}
        for alpha, c in terms.items():
            alpha = MultiIndex(alpha)
            if len(alpha) != nvars:
                raise ValueError(f"multi-index {tuple(alpha)} has wrong length for {nvars} variables")
            if integer:
                if not isinstance(c, Integral):
                    raise TypeError(f"non-integer coefficient {c!r} in integer polynomial")
                c = int(c)
            else:
                c = complex(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
                if clean[alpha] == 0:
                    del clean[alpha]
        self.nvars = nvars
        self.terms = clean
        self.integer = bool(integer)

    # construction helpers
    @classmethod
    def constant(cls, c, nvars: int = 1) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int, integer: bool = True) -> "Poly":
        alpha = [0] * nvars
        alpha[i] = 1
        return cls(nvars, {tuple(alpha): 1 if integer else 1.0 + 0j}, integer=integer)

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff=1) -> "Poly":
        return cls(len(alpha), {tuple(alpha): coeff})

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree ``-1``."""
        return max((a.order for a in self.terms), default=-1)

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    def coeff_max(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def coefficient(self, alpha: Sequence[int]):
        return self.terms.get(MultiIndex(alpha), 0)

    def as_complex(self) -> "Poly":
        return Poly(self.nvars, {a: complex(c) for a, c in self.terms.items()}, integer=False)

    # ring operations
    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials live in different numbers of variables")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.constant(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0) + c
        return Poly(self.nvars, terms, integer=self.integer and other.integer)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {a: -c for a, c in self.terms.items()}, integer=self.integer)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms: dict[MultiIndex, object] = {}
        for a, c in self.terms.items():
            for b, d in other.terms.items():
                key = a + b
                terms[key] = terms.get(key, 0) + c * d
        return Poly(self.nvars, terms, integer=self.integer and other.integer)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        kind = "int" if self.integer else "complex"
        return f"Poly(nvars={self.nvars}, degree={self.degree}, {kind}, terms={len(self.terms)})"

    def scale(self, factor) -> "Poly":
        """Multiply by a scalar; an integer factor keeps integer coefficients."""
        integer = self.integer and isinstance(factor, Integral)
        return Poly(self.nvars, {a: c * factor for a, c in self.terms.items()}, integer=integer)

    def recenter(self, center: Sequence[complex]) -> "Poly":
        """Coefficients of ``w -> P(center + w)``."""
        if len(center) != self.nvars:
            raise ValueError("center has wrong dimension")
        if all(c == 0 for c in center):
            return self.as_complex()
        out: dict[MultiIndex, complex] = {}
        for alpha, c in self.terms.items():
            ranges = [range(a + 1) for a in alpha]
            for beta in itertools.product(*ranges):
                coef = complex(c) * alpha.binom(beta)
                for a_j, b_j, z_j in zip(alpha, beta, center):
                    coef *= complex(z_j) ** (a_j - b_j)
                out[beta] = out.get(beta, 0) + coef
        return Poly(self.nvars, out, integer=False)

    # evaluation
    def __call__(self, z):
        return evaluate(self, z)

    def evaluate_many(self, points) -> np.ndarray:
        """Double-precision values at the rows of a ``(P, nvars)`` array."""
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None] if self.nvars == 1 else pts[None, :]
        if pts.shape[1] != self.nvars:
            raise ValueError(f"points have dimension {pts.shape[1]}, polynomial has {self.nvars}")
        deg = max(self.degree, 0)
        powers = np.ones((deg + 1,) + pts.shape, dtype=complex)
        for d in range(1, deg + 1):
            powers[d] = powers[d - 1] * pts
        out = np.zeros(pts.shape[0], dtype=complex)
        for alpha, c in self.terms.items():
            term = np.full(pts.shape[0], complex(c))
            for j, a in enumerate(alpha):
                if a:
                    term = term * powers[a, :, j]
            out += term
        return out

    def evaluate_mp(self, z: Sequence, ctx=None):
        """Value in an mpmath context (``mpmath.mp`` or ``mpmath.iv``)."""
        ctx = ctx or mpmath.mp
        if len(z) != self.nvars:
            raise ValueError("dimension mismatch")
        zs = [_to_ctx(ctx, v) for v in z]
        deg = max(self.degree, 0)
        powers = []
        for v in zs:
            row = [ctx.mpf(1)]
            for _ in range(deg):
                row.append(row[-1] * v)
            powers.append(row)
        total = ctx.mpf(0)
        for alpha, c in self.terms.items():
            term = _to_ctx(ctx, c)
            for j, a in enumerate(alpha):
                if a:
                    term = term * powers[j][a]
            total = total + term
        return total

    # serialization
    def to_json(self) -> dict:
        rows = []
        for alpha in sorted(self.terms, key=lambda a: (a.order, tuple(-x for x in a))):
            c = self.terms[alpha]
            if self.integer:
                rows.append({"alpha": list(alpha), "coeff": str(c)})
            else:
                rows.append({"alpha": list(alpha), "re": c.real, "im": c.imag})
        return {"nvars": self.nvars, "terms": rows}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Poly":
        nvars = int(doc["nvars"])
        rows = doc["terms"]
        integer = all("coeff" in r for r in rows)
        terms = {}
        for r in rows:
            alpha = tuple(int(a) for a in r["alpha"])
            if integer:
                terms[alpha] = int(r["coeff"])
            else:
                terms[alpha] = complex(float(r.get("re", 0.0)), float(r.get("im", 0.0)))
        return cls(nvars, terms, integer=integer)


def _to_ctx(ctx, v):
    if isinstance(v, Fraction):
        return ctx.mpf(v.numerator) / ctx.mpf(v.denominator)
    if isinstance(v, complex):
        return ctx.mpc(v.real, v.imag) if v.imag else ctx.mpf(v.real)
    if isinstance(v, (int, float)):
        return ctx.mpf(v)
    return v


def evaluate(P: Poly, z: Sequence, tol: float = 1e-12):
    """Evaluate ``P`` at a single point.

    Exact rational input with an integer polynomial gives an exact
    ``Fraction``.  Integer polynomials at inexact points are evaluated in
    mpmath with doubling precision until two successive values agree to
    ``1e-3 * tol`` relative.  Complex polynomials use double precision.
    """
    z = list(z) if not np.isscalar(z) else [z]
    if len(z) != P.nvars:
        raise ValueError(f"point has dimension {len(z)}, polynomial has {P.nvars}")
    if P.integer and all(_is_exact(v) for v in z):
        total = Fraction(0)
        for alpha, c in P.terms.items():
            term = Fraction(c)
            for v, a in zip(z, alpha):
                term *= Fraction(v) ** a
            total += term
        return total
    if not P.integer:
        return complex(P.evaluate_many(np.array([z], dtype=complex))[0])
    prec = 64
    with mpmath.workprec(prec):
        prev = P.evaluate_mp([mpmath.mpmathify(v) for v in z])
    while True:
        prec *= 2
        with mpmath.workprec(prec):
            cur = P.evaluate_mp([mpmath.mpmathify(v) for v in z])
            scale = max(abs(cur), mpmath.mpf(2) ** (-prec // 2))
            if abs(cur - prev) <= 1e-3 * tol * scale or prec > 1 << 16:
                break
            prev = cur
    value = complex(cur)
    if value == 0 and cur != 0:
        return cur  # below double range; keep the mpmath value
    return value


class Polydisk:
    """Open polydisk ``Delta(center, radius)`` with equal radii."""

    __slots__ = ("center", "radius")

    def __init__(self, center: Sequence[complex], radius: float):
        if not radius > 0:
            raise ValueError("polydisk radius must be positive")
        self.center = tuple(complex(c) for c in np.atleast_1d(center))
        self.radius = float(radius)

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, points, closed: bool = False) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        d = np.abs(pts - np.asarray(self.center)).max(axis=1)
        return d <= self.radius if closed else d < self.radius

    def torus(self, grid: int) -> np.ndarray:
        """``grid**n`` points of the distinguished boundary, row-major in angle."""
        theta = 2 * np.pi * np.arange(grid) / grid
        ring = np.exp(1j * theta) * self.radius
        mesh = np.meshgrid(*([ring] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1) + np.asarray(self.center)

    def __repr__(self):
        return f"Polydisk(center={self.center}, radius={self.radius})"

    def __eq__(self, other):
        return isinstance(other, Polydisk) and self.center == other.center and self.radius == other.radius


def sup_on_polydisk(P: Poly, disk: Polydisk, grid: int = 64) -> tuple[float, float]:
    """Two-sided bracket ``[lo, hi]`` on ``sup |P|`` over the closed polydisk.

    ``lo`` is the largest modulus on a ``grid**n`` sample of the distinguished
    boundary.  ``hi`` combines two certified bounds: the triangle inequality
    on the recentred coefficients, and the second-order Bernstein bound
    ``sup <= lo / (1 - (deg*pi/grid)**2 / 2)`` for the nearest sample to the
    maximiser.
    """
    if grid < 8:
        raise ValueError("need at least 8 samples per angular variable")
    if P.nvars != disk.dim:
        raise ValueError("dimension mismatch between polynomial and polydisk")
    deg = max(P.degree, 0)
    vals = np.abs(P.evaluate_many(disk.torus(grid)))
    lo = float(vals.max()) if vals.size else 0.0
    local = P.recenter(disk.center)
    hi = sum(abs(c) * disk.radius ** a.order for a, c in local.terms.items())
    omega = deg * np.pi / grid
    if omega ** 2 < 2:
        hi = min(hi, lo / (1 - omega ** 2 / 2))
    hi = float(hi) * (1 + 1e-12)
    return lo, max(hi, lo)


def taylor_truncation_bound(R: float, r: float, k: int, supf: float) -> float:
    """Error of the best degree-``k`` approximant on ``Delta(a, r)``.

    ``supf`` bounds ``|f|`` on ``Delta(a, R)``.
    """
    if not R > r:
        raise ValueError("requires R > r")
    if not r > 0:
        raise ValueError("requires r > 0")
    if k < 0 or supf < 0:
        raise ValueError("requires k >= 0 and supf >= 0")
    return supf / (R - r) * (r / R) ** k


def bernstein_extend(P: Poly, disk_small: Polydisk, disk_big: Polydisk, A: float) -> float:
    """Bound on ``|P|`` over ``disk_big`` given ``|P| <= A`` on ``disk_small``."""
    if disk_small.center != disk_big.center:
        raise ValueError("polydisks must share a center")
    r, R = disk_small.radius, disk_big.radius
    if not R > r:
        raise ValueError("requires R > r")
    return A * (R / r) ** max(P.degree, 0)


def rescale_into_unit_ball(P: Poly, r: float, R: float) -> Poly:
    """``(r/R)**deg P * P``: bounded by 1 on the large polydisk if it was on the small one."""
    if not R > r > 0:
        raise ValueError("requires R > r > 0")
    return P.as_complex().scale((r / R) ** max(P.degree, 0))


def cauchy_coeff_bound(R: float, alpha: Sequence[int]) -> float:
    """Cauchy estimate ``R**-|alpha|`` for Taylor coefficients of a function bounded by 1."""
    if not R > 0:
        raise ValueError("requires R > 0")
    return float(R) ** (-sum(alpha))
