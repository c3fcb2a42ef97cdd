"""Truncated Taylor jets, Gevrey constants and polynomial reduction on graphs.

A :class:`Jet` stores Taylor coefficients ``d^alpha f / alpha!`` at a base
point, truncated at total degree ``order``.  Coefficients are exact
``Fraction`` values for rational data and ``mpmath.iv`` intervals otherwise,
so every comparison against a Gevrey bound is one-sided.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import mpmath
import numpy as np
from mpmath import iv

from .polynomials import MultiIndex, Poly, multi_indices, multi_indices_of_order
from .trace_space import PointCloud

IV_PREC = 160


class PreconditionError(ValueError):
    pass


@contextlib.contextmanager
def iv_precision(bits: int):
    old = iv.prec
    iv.prec = max(bits, old)
    try:
        yield
    finally:
        iv.prec = old


def _is_iv(v) -> bool:
    return isinstance(v, iv.mpf) or type(v).__name__ in ("ivmpf", "ivmpc")


def to_iv(v):
    if _is_iv(v):
        return v
    if isinstance(v, Fraction):
        return iv.mpf(v.numerator) / v.denominator
    if isinstance(v, float):
        return iv.mpf(v)
    return iv.mpf(v)


def endpoints(v) -> tuple:
    """Interval endpoints as plain ``mpf`` values."""
    a, b = v._mpi_
    return mpmath.mp.make_mpf(a), mpmath.mp.make_mpf(b)


def abs_hi(v):
    """Upper bound on ``|v|`` (exact for rationals)."""
    if _is_iv(v):
        a, b = endpoints(v)
        return max(abs(a), abs(b))
    return abs(v)


def abs_lo(v):
    if _is_iv(v):
        a, b = endpoints(v)
        if a <= 0 <= b:
            return mpmath.mpf(0)
        return min(abs(a), abs(b))
    return abs(v)


def _hi_float(v) -> float:
    x = float(v)
    return math.nextafter(x, math.inf) if x < math.inf else x


class Jet:
    """Taylor jet in ``nvars`` variables truncated at total degree ``order``."""

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars: int, order: int, coeffs: dict | None = None):
        if order < 0 or nvars < 1:
            raise ValueError("need order >= 0 and nvars >= 1")
        self.nvars = nvars
        self.order = order
        self.coeffs = {}
        for a, c in (coeffs or {}).items():
            a = MultiIndex(a)
            if len(a) != nvars:
                raise ValueError("multi-index length does not match nvars")
            if a.order <= order and not (isinstance(c, (int, Fraction)) and c == 0):
                self.coeffs[a] = c

    # construction
    @classmethod
    def constant(cls, c, nvars: int = 1, order: int = 0) -> "Jet":
        return cls(nvars, order, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int, order: int, base=Fraction(0)) -> "Jet":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, order, {(0,) * nvars: base, tuple(e): Fraction(1)})

    @classmethod
    def univariate(cls, coeffs: Sequence, nvars: int = 1, axis: int = 0, order: int | None = None) -> "Jet":
        order = len(coeffs) - 1 if order is None else order
        out = {}
        for k, c in enumerate(coeffs[:order + 1]):
            e = [0] * nvars
            e[axis] = k
            out[tuple(e)] = c
        return cls(nvars, order, out)

    def coefficient(self, alpha):
        return self.coeffs.get(MultiIndex(alpha), Fraction(0))

    def derivative(self, alpha):
        """``d^alpha f`` at the base point."""
        alpha = MultiIndex(alpha)
        return self.coefficient(alpha) * alpha.factorial()

    @property
    def exact(self) -> bool:
        return all(not _is_iv(c) for c in self.coeffs.values())

    def _check(self, other: "Jet"):
        if not isinstance(other, Jet):
            raise TypeError("expected a Jet")
        if other.nvars != self.nvars:
            raise ValueError("jets in different numbers of variables")
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    @staticmethod
    def _pair(a, b):
        if _is_iv(a) != _is_iv(b):
            return to_iv(a), to_iv(b)
        return a, b

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(other, self.nvars, self.order)
        self._check(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            if a in out:
                x, y = self._pair(out[a], c)
                out[a] = x + y
            else:
                out[a] = c
        return Jet(self.nvars, self.order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Jet":
        return Jet(self.nvars, self.order, {a: self._pair(v, c)[0] * self._pair(v, c)[1]
                                            for a, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for a, c in self.coeffs.items():
            room = self.order - a.order
            for b, d in other.coeffs.items():
                if b.order > room:
                    continue
                x, y = self._pair(c, d)
                key = a + b
                if key in out:
                    u, v = self._pair(out[key], x * y)
                    out[key] = u + v
                else:
                    out[key] = x * y
        return Jet(self.nvars, self.order, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Jet":
        """Binary powering of truncated products."""
        if not isinstance(k, int) or k < 0:
            raise ValueError("power must be a non-negative integer")
        result = Jet.constant(Fraction(1), self.nvars, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Jet) or other.nvars != self.nvars or other.order != self.order:
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coefficient(a) == other.coefficient(a) for a in keys)

    def __hash__(self):
        return hash((self.nvars, self.order, frozenset(self.coeffs)))

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, terms={len(self.coeffs)})"

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def reciprocal(self) -> "Jet":
        """``1/f`` via the geometric series in ``f/f(0) - 1``."""
        c0 = self.constant_term()
        if abs_lo(c0) == 0:
            raise ZeroDivisionError("jet with vanishing constant term has no reciprocal")
        inv0 = (Fraction(1) / c0) if isinstance(c0, (int, Fraction)) else 1 / c0
        u = self.scale(inv0) - Jet.constant(Fraction(1), self.nvars, self.order)
        # 1/(1+u) = sum (-u)^j, exact up to the truncation order since u(0) = 0
        acc = Jet.constant(Fraction(1), self.nvars, self.order)
        for _ in range(self.order):
            acc = Jet.constant(Fraction(1), self.nvars, self.order) - u * acc
        return acc.scale(inv0)

    def compose(self, outer: "Jet") -> "Jet":
        """``outer(self)``; ``outer`` is a one-variable jet taken at ``self``'s constant term."""
        if outer.nvars != 1:
            raise ValueError("outer jet must be univariate")
        if outer.order < self.order:
            raise ValueError("outer jet order is below the inner jet order")
        u = self - Jet.constant(self.constant_term(), self.nvars, self.order)
        acc = Jet.constant(outer.coefficient((self.order,)), self.nvars, self.order)
        for j in range(self.order - 1, -1, -1):
            acc = acc * u + Jet.constant(outer.coefficient((j,)), self.nvars, self.order)
        return acc

    def to_poly(self) -> Poly:
        return Poly(self.nvars, {tuple(a): complex(mpmath.mpf(to_iv(c).mid) if _is_iv(c) else float(c))
                                 for a, c in self.coeffs.items()}, integer=False)


def jet_add(a: Jet, b: Jet) -> Jet:
    return a + b


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_power(a: Jet, k: int) -> Jet:
    return a ** k


def jet_compose(outer: Jet, inner: Jet) -> Jet:
    return inner.compose(outer)


def sin_jet(order: int) -> Jet:
    """Exact Taylor jet of ``sin`` at 0."""
    c = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1, 2):
        c[k] = Fraction((-1) ** (k // 2), math.factorial(k))
    return Jet.univariate(c)


def geometric_jet(order: int) -> Jet:
    """Jet of ``1/(1-x)`` at 0."""
    return Jet.univariate([Fraction(1)] * (order + 1))


# families ---------------------------------------------------------------

KINDS = ("analytic_rational", "lacunary_cosine", "exponential")


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v)) if isinstance(v, float) else Fraction(v)


def _shift_poly(coeffs: Sequence[Fraction], x0: Fraction, order: int) -> list:
    """Coefficients of ``p(x0 + t)`` in ``t`` up to ``order``."""
    d = len(coeffs) - 1
    out = []
    for k in range(min(d, order) + 1):
        out.append(sum(coeffs[j] * math.comb(j, k) * x0 ** (j - k) for j in range(k, d + 1)))
    return out + [Fraction(0)] * (order - len(out) + 1)


@dataclass
class GevreyFamily:
    """A Gevrey-``s`` test function of one coordinate ``x[axis]`` over a box.

    ``C`` is the shifted-convention constant with ``|d^a f| <= C**(|a|+1) (a!)**s``;
    ``C_power`` is the constant of the power bound, calibrated for
    ``f / sup_bound`` so that the normalised function is bounded by 1.
    """

    s: float
    kind: str
    params: dict
    box: list
    axis: int = 0
    C: float | None = None
    C_power: float | None = None
    sup_bound: float | None = None
    max_order_validated: int = 0
    attained: dict = field(default_factory=dict)

    @property
    def nvars(self) -> int:
        return len(self.box)

    @property
    def exact(self) -> bool:
        return self.kind == "analytic_rational"

    def univariate_coeffs(self, x0, order: int) -> list:
        kind, p = self.kind, self.params
        if kind == "analytic_rational":
            x0 = _frac(x0)
            num = _shift_poly([_frac(c) for c in p["num"]], x0, order)
            den = _shift_poly([_frac(c) for c in p.get("den", [1])], x0, order)
            if den[0] == 0:
                raise ValueError(f"pole at x = {x0}")
            jn = Jet.univariate(num, order=order)
            jd = Jet.univariate(den, order=order)
            j = jn * jd.reciprocal()
            return [j.coefficient((k,)) for k in range(order + 1)]
        with iv_precision(IV_PREC):
            x = to_iv(_frac(x0))
            if kind == "exponential":
                A, lam = to_iv(_frac(p.get("A", 1))), to_iv(_frac(p.get("lam", 1)))
                base = A * iv.exp(lam * x)
                return [base * lam ** k / math.factorial(k) for k in range(order + 1)]
            if kind == "lacunary_cosine":
                return self._lacunary(x, order)
        raise ValueError(f"unknown kind {kind!r}")

    def _lacunary_terms(self, order: int) -> int:
        sigma = float(self.params.get("sigma", self.s))
        # stop once every order's next term is below 1e-40 of its partial sum
        # and the term ratio has dropped under 1/2 (then the tail is <= 2 * next term)
        J, partial = 0, [0.0] * (order + 1)
        while True:
            lam = 2.0 ** J
            la = -lam ** (1 / sigma)
            logs = [la + k * J * math.log(2) for k in range(order + 1)]
            for k, v in enumerate(logs):
                partial[k] = max(partial[k], v)
            ratio_ok = order * math.log(2) - (2 ** ((J + 1) / sigma) - 2 ** (J / sigma)) < -math.log(2)
            if J > 3 and ratio_ok and all(v < partial[k] - 92 for k, v in enumerate(logs)):
                return J
            J += 1

    def _lacunary(self, x, order: int) -> list:
        sigma = to_iv(_frac(self.params.get("sigma", self.s)))
        J = self._lacunary_terms(order)
        out = [iv.mpf(0)] * (order + 1)
        for j in range(J):
            lam = iv.mpf(2) ** j
            a = iv.exp(-(lam ** (1 / sigma)))
            for k in range(order + 1):
                out[k] += a * lam ** k * iv.cos(lam * x + k * iv.pi / 2)
        for k in range(order + 1):
            lamJ = iv.mpf(2) ** J
            tail = 2 * iv.exp(-(lamJ ** (1 / sigma))) * lamJ ** k
            out[k] = (out[k] + iv.mpf([-endpoints(tail)[1], endpoints(tail)[1]])) / math.factorial(k)
        return out

    def jet(self, x: Sequence, order: int) -> Jet:
        """Jet of ``f`` at the point ``x`` (one coordinate per box axis)."""
        return Jet.univariate(self.univariate_coeffs(x[self.axis], order), self.nvars, self.axis, order)

    def value(self, x: Sequence) -> float:
        c = self.univariate_coeffs(x[self.axis], 0)[0]
        return float(to_iv(c).mid) if _is_iv(c) else float(c)

    def values(self, X: np.ndarray) -> np.ndarray:
        """Double-precision values at the rows of ``X`` (shape ``(P, nvars)``)."""
        x = np.asarray(X, float)[:, self.axis]
        p = self.params
        if self.kind == "analytic_rational":
            return np.polyval([float(c) for c in p["num"]][::-1], x) / np.polyval(
                [float(c) for c in p.get("den", [1])][::-1], x)
        if self.kind == "exponential":
            return float(_frac(p.get("A", 1))) * np.exp(float(_frac(p.get("lam", 1))) * x)
        sigma = float(p.get("sigma", self.s))
        J = self._lacunary_terms(0)
        return sum(math.exp(-(2.0 ** j) ** (1 / sigma)) * np.cos(2.0 ** j * x) for j in range(J))

    def to_json(self) -> dict:
        return {"kind": self.kind, "s": self.s, "params": self.params, "box": self.box, "axis": self.axis,
                "C": self.C, "C_power": self.C_power, "sup_bound": self.sup_bound,
                "max_order_validated": self.max_order_validated}


def make_gevrey_family(s: float, kind: str, params: dict | None = None, box=None, axis: int = 0) -> GevreyFamily:
    """Build a test family; rational families are checked for poles on the box."""
    if s < 1:
        raise ValueError("Gevrey order s must be >= 1")
    if kind not in KINDS:
        raise ValueError(f"unknown family kind {kind!r}; expected one of {KINDS}")
    params = dict(params or {})
    box = [list(map(float, b)) for b in (box or [[-1.0, 1.0]])]
    if not 0 <= axis < len(box):
        raise ValueError("axis outside the box dimension")
    if kind == "analytic_rational":
        params.setdefault("num", [1])
        params.setdefault("den", [1])
        den = [float(_frac(c)) for c in params["den"]]
        lo, hi = box[axis]
        if not any(den):
            raise ValueError("zero denominator")
        roots = np.roots(den[::-1]) if len(den) > 1 else np.array([])
        for z in roots:
            if abs(z.imag) < 1e-9 and lo - 1e-9 <= z.real <= hi + 1e-9:
                raise ValueError(f"pole inside K at x = {z.real:.6g}")
    if kind == "lacunary_cosine":
        params.setdefault("sigma", s)
        if float(params["sigma"]) < 1:
            raise ValueError("lacunary exponent sigma must be >= 1")
    return GevreyFamily(float(s), kind, params, box, axis)


def sample_points(box: Sequence, samples: int, exact: bool = True) -> list:
    """Uniform grid with ``samples`` points per axis (rational if ``exact``)."""
    if samples < 1:
        raise ValueError("samples must be positive")
    axes = []
    for lo, hi in box:
        lo_f, hi_f = _frac(lo), _frac(hi)
        if samples == 1:
            pts = [(lo_f + hi_f) / 2]
        else:
            pts = [lo_f + (hi_f - lo_f) * i / (samples - 1) for i in range(samples)]
        axes.append(pts if exact else [float(p) for p in pts])
    return [tuple(p) for p in product(*axes)]


def _factorial_pow(alpha: MultiIndex, s: float):
    f = alpha.factorial()
    if float(s).is_integer():
        return Fraction(f ** int(s))
    return to_iv(f) ** to_iv(_frac(s))


def _ratio_hi(value, alpha: MultiIndex, s: float, scale=1):
    """Upper bound of ``|value| / (scale * (alpha!)**s)`` as an iv-compatible number."""
    den = _factorial_pow(alpha, s)
    v = abs_hi(value)
    if isinstance(v, Fraction) and isinstance(den, Fraction) and isinstance(scale, (int, Fraction)):
        return v / (den * scale)
    return endpoints(to_iv(v) / (to_iv(den) * to_iv(scale)))[1]


def _root_hi(x, p: int) -> float:
    if x == 0 or x == 1:
        return float(x)
    with iv_precision(IV_PREC):
        r = to_iv(x) ** (iv.mpf(1) / p)
        return _hi_float(endpoints(r)[1])


@dataclass
class Calibration:
    C: float
    x: tuple
    alpha: tuple
    per_order: list
    convention: str


def _as_oracle(f) -> tuple[Callable, list, float]:
    if isinstance(f, GevreyFamily):
        return f.jet, f.box, f.s
    return f, None, None


def calibrate(f, K=None, maxorder: int = 8, samples: int = 9, s: float | None = None,
              convention: str = "shifted", scale=1) -> Calibration:
    """Smallest constant on the sample grid for the chosen convention.

    ``shifted``: ``|d^a f| <= C**(|a|+1) (a!)**s`` over ``|a| <= maxorder``.
    ``power``: ``|d^a f| <= scale * C**|a| (a!)**s`` over ``1 <= |a|``, the
    form the power bound is proved with (``f/scale`` bounded by 1).
    """
    if maxorder < 2:
        raise ValueError("maxorder must be at least 2")
    oracle, box, fs = _as_oracle(f)
    K = K or box
    s = fs if s is None else s
    if K is None or s is None:
        raise ValueError("need a box K and an order s")
    if convention not in ("shifted", "power"):
        raise ValueError("convention must be 'shifted' or 'power'")
    best = (0.0, None, None)
    per_order = [0.0] * (maxorder + 1)
    for x in sample_points(K, samples, exact=True):
        try:
            J = oracle(x, maxorder)
        except ZeroDivisionError as e:
            raise ValueError(f"evaluator failure at {x}: {e}") from e
        for alpha, c in J.coeffs.items():
            k = alpha.order
            if convention == "power" and k == 0:
                continue
            d = c * alpha.factorial()
            ratio = _ratio_hi(d, alpha, s, scale)
            C = _root_hi(ratio, k + 1 if convention == "shifted" else k)
            per_order[k] = max(per_order[k], C)
            if C > best[0]:
                best = (C, x, tuple(alpha))
    C = best[0] if best[1] is not None else (1.0 if convention == "shifted" else 0.0)
    return Calibration(C, tuple(float(v) for v in best[1]) if best[1] else (), best[2] or (), per_order, convention)


def calibrate_constant(f, K=None, maxorder: int = 8, samples: int = 9, s: float | None = None) -> float:
    """``C_K`` of the Gevrey inequality on a sample grid (shifted convention)."""
    return calibrate(f, K, maxorder, samples, s, "shifted").C


def sup_bound(f: GevreyFamily, samples: int = 33) -> float:
    """Sampled sup of ``|f|`` over the box (upper endpoints of intervals)."""
    m = 0.0
    for x in sample_points(f.box, samples):
        m = max(m, _hi_float(abs_hi(f.univariate_coeffs(x[f.axis], 0)[0])))
    return m


def validate_family(f: GevreyFamily, maxorder: int = 12, samples: int = 9, growth_slope: float = 0.5) -> dict:
    """Calibrate ``f`` and decide whether its claimed ``s`` is credible.

    Per-order constants of a genuine Gevrey-``s`` function level off; if
    the true order exceeds ``s`` they grow like a power of the order.  The
    family is rejected when the log-log slope of the per-order constants over
    the upper half of the orders exceeds ``growth_slope``.
    """
    cal = calibrate(f, maxorder=maxorder, samples=samples)
    ks = np.arange(max(2, maxorder // 2), maxorder + 1)
    cs = np.array([cal.per_order[k] for k in ks])
    if np.all(cs > 0):
        slope = float(np.polyfit(np.log(ks), np.log(cs), 1)[0])
    else:
        slope = 0.0
    accepted = slope <= growth_slope
    if accepted:
        f.C = cal.C
        f.max_order_validated = maxorder
        f.attained = {"x": cal.x, "alpha": cal.alpha}
        f.sup_bound = max(1.0, sup_bound(f))
        f.C_power = calibrate(f, maxorder=maxorder, samples=samples, convention="power",
                              scale=_frac(f.sup_bound)).C
    return {"accepted": accepted, "C": cal.C, "growth_slope": slope, "per_order": cal.per_order,
            "attained": {"x": cal.x, "alpha": cal.alpha}}


@dataclass
class PowerBoundReport:
    k: int
    maxorder: int
    C: float
    checked: int
    violations: list
    undecided: int

    @property
    def ok(self) -> bool:
        return not self.violations


def check_power_bound(f: GevreyFamily, k: int, maxorder: int, samples: int = 9,
                      C: float | None = None) -> PowerBoundReport:
    """Check ``|d^a f^k| <= C**|a| binom(a+k-1, a) (a!)**s`` on the sample grid.

    ``C`` defaults to the power-convention calibration of ``f``.  Violations
    list ``(x, alpha, lhs, rhs)`` with exact values for rational families.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    pts = sample_points(f.box, samples)
    for x in pts:
        v = f.univariate_coeffs(x[f.axis], 0)[0]
        if abs_lo(v) > 1:
            raise PreconditionError(f"|f| > 1 at x = {tuple(float(t) for t in x)}")
    if C is None:
        C = calibrate(f, maxorder=max(2, maxorder), samples=samples, convention="power").C
    Cf = _frac(C)
    viol, undecided, checked = [], 0, 0
    s = f.s
    for x in pts:
        Jk = f.jet(x, maxorder) ** k
        for alpha in multi_indices(f.nvars, maxorder):
            lhs = Jk.coefficient(alpha) * alpha.factorial()
            binom = math.prod(math.comb(a + k - 1, a) for a in alpha)
            fp = _factorial_pow(alpha, s)
            checked += 1
            if isinstance(fp, Fraction) and not _is_iv(lhs):
                rhs = Cf ** alpha.order * binom * fp
                if abs(lhs) > rhs:
                    viol.append((tuple(x), tuple(alpha), lhs, rhs))
            else:
                with iv_precision(IV_PREC):
                    rhs = to_iv(Cf) ** alpha.order * binom * to_iv(fp)
                    lo, hi = abs_lo(to_iv(lhs)), abs_hi(to_iv(lhs))
                    if lo > endpoints(rhs)[1]:
                        viol.append((tuple(x), tuple(alpha), lhs, rhs))
                    elif hi > endpoints(rhs)[0]:
                        undecided += 1
    return PowerBoundReport(k, maxorder, float(C), checked, viol, undecided)


# graphs -----------------------------------------------------------------

@dataclass
class GevreyGraph:
    """Local graph ``{(x + i h(x), H(x))}`` of a real ``m``-manifold in ``C^n``.

    The normal form asks ``h'(p) = H'(p) = 0``; it is checked by
    :meth:`is_normalized` but not imposed, since graphs such as ``w = e^x``
    are useful test cases without it.
    """

    m: int
    n: int
    s: float
    h: list
    H: list
    box: list
    base: tuple = ()

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise ValueError("need 1 <= m <= n")
        if len(self.h) != self.m or len(self.H) != self.n - self.m:
            raise ValueError("need m functions h and n-m functions H")
        if len(self.box) != self.m:
            raise ValueError("box must have m intervals")
        if not self.base:
            self.base = tuple(Fraction(0) for _ in range(self.m))

    @property
    def families(self) -> list:
        return list(self.h) + list(self.H)

    def is_normalized(self) -> bool:
        for f in self.families:
            J = f.jet(self.base, 1)
            for i in range(self.m):
                e = [0] * self.m
                e[i] = 1
                if abs_hi(J.coefficient(e)) != 0:
                    return False
        return True

    def calibrate(self, maxorder: int = 12, samples: int = 9) -> float:
        """Validate every family; return the largest power-convention constant."""
        C = 0.0
        for f in self.families:
            rep = validate_family(f, maxorder, samples)
            if not rep["accepted"]:
                raise ValueError(f"family {f.kind} failed Gevrey-{f.s} validation")
            C = max(C, f.C_power)
        return max(C, 1e-300)

    @classmethod
    def from_json(cls, doc: dict) -> "GevreyGraph":
        m, n, s = int(doc["m"]), int(doc["n"]), float(doc.get("s", 1))
        box = doc["box"]

        def fam(entry):
            return make_gevrey_family(float(entry.get("s", s)), entry["kind"], entry.get("params", {}),
                                      box, int(entry.get("axis", 0)))

        return cls(m, n, s, [fam(d) for d in doc.get("h", [])], [fam(d) for d in doc.get("H", [])], box)

    def to_json(self) -> dict:
        return {"m": self.m, "n": self.n, "s": self.s, "box": self.box,
                "h": [f.to_json() for f in self.h], "H": [f.to_json() for f in self.H]}


def zero_family(box, axis: int = 0) -> GevreyFamily:
    return make_gevrey_family(1, "analytic_rational", {"num": [0], "den": [1]}, box, axis)


def sample_graph(G: GevreyGraph, density: int, R: float | None = None) -> PointCloud:
    """Points ``(x + i h(x), H(x))`` over a ``density**m`` grid of the box.

    The inner radius is the sampled sup-distance times 1.05; ``R`` defaults
    to ``max(1, 4 r')``.
    """
    if density < 2:
        raise ValueError("density must be at least 2")
    axes = [np.linspace(lo, hi, density) for lo, hi in G.box]
    X = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    cols = [X[:, j] + 1j * G.h[j].values(X) for j in range(G.m)]
    cols += [G.H[k].values(X).astype(complex) for k in range(G.n - G.m)]
    pts = np.stack(cols, axis=1)
    probe = PointCloud.from_points(pts, R=1.0, inner_factor=1.05) if np.ptp(pts) > 0 else None
    rp = probe.inner_radius if probe is not None else 0.0
    if R is None:
        R = max(1.0, 4 * rp)
    return PointCloud.from_points(pts, R=R, inner_factor=1.05, label="graph")


def split_holomorphic(P: Poly, m: int) -> Poly:
    """Rewrite ``P(z, w)`` with ``z = x + i y`` as a polynomial in ``(x, y, w)``.

    ``P`` has ``n`` variables, the first ``m`` of which are ``z``; the result
    has ``n + m`` variables ordered ``(x_1..x_m, y_1..y_m, w_1..w_{n-m})``.
    """
    n = P.nvars
    out: dict = {}
    for alpha, c in P.terms.items():
        expansions = []
        for j in range(m):
            a = alpha[j]
            expansions.append([(p, a - p, math.comb(a, p) * 1j ** (a - p)) for p in range(a + 1)])
        for choice in product(*expansions):
            coef = complex(c)
            xs, ys = [], []
            for px, py, b in choice:
                coef *= b
                xs.append(px)
                ys.append(py)
            key = tuple(xs) + tuple(ys) + tuple(alpha[m:])
            out[key] = out.get(key, 0) + coef
    return Poly(n + m, out, integer=False)


def _graph_remainder_sum(m: int, N: int, s: float, k: int) -> float:
    """``sum_{|a|=N+1} binom(a+K-1, a) (a!)**(s-1)`` with ``K = max(k, N)``."""
    K = max(k, N)
    total = mpmath.mpf(0)
    for a in multi_indices_of_order(m, N + 1):
        b = math.prod(math.comb(ai + K - 1, ai) for ai in a)
        total += b * mpmath.mpf(a.factorial()) ** (s - 1)
    return float(total) * (1 + 1e-12)


def reduce_on_graph(P: Poly, G: GevreyGraph, center: Sequence, N: int, delta: float | None = None,
                    C: float | None = None) -> tuple[Poly, float]:
    """Substitute degree-``N`` Taylor jets of ``h**mu H**nu`` into ``P(x, y, w)``.

    Returns a polynomial in ``t = x - center`` of degree at most ``N`` and a
    bound on ``|P - reduced|`` over ``|t| <= delta`` built from the power
    bound: each monomial ``y**mu w**nu`` of total degree ``k >= 1``
    contributes ``C**(N+1) delta**N sum binom(a+K-1, a) (a!)**(s-1)`` times the
    scale factors of its functions and the size of its ``x`` part.
    Products of the ``x`` part with the jets that exceed degree ``N`` are
    dropped and their exact size on the ``delta``-box is added.
    """
    m, n = G.m, G.n
    if P.nvars != n + m:
        raise ValueError(f"P must have {n + m} variables (x, y, w)")
    for c in P.terms.values():
        if abs(c) > 1 + 1e-12:
            raise ValueError("coefficient bound |c| <= 1 violated")
    if delta is None:
        delta = N ** -1.0
    center = tuple(_frac(c) for c in center)
    fams = G.families
    if C is None and any(a[m:] and any(a[m:]) for a in P.terms):
        C = G.calibrate()
    order_hi = N + max((sum(a[:m]) for a in P.terms), default=0)

    base_jets = [f.jet(center, N) for f in fams]
    power_cache: dict = {}

    def fpow(i, e):
        if (i, e) not in power_cache:
            power_cache[(i, e)] = base_jets[i] ** e
        return power_cache[(i, e)]

    def pad(J: Jet, order: int) -> Jet:
        return Jet(J.nvars, order, J.coeffs)

    acc: dict = {}
    remainder = 0.0
    Snk: dict = {}
    for alpha, c in P.terms.items():
        lam, rest = alpha[:m], alpha[m:]
        g = Jet.constant(Fraction(1), m, N)
        k = sum(rest)
        for i, e in enumerate(rest):
            if e:
                g = g * fpow(i, e)
        xl = Jet.constant(Fraction(1), m, order_hi)
        for i, e in enumerate(lam):
            if e:
                xl = xl * (Jet.variable(i, m, order_hi, center[i]) ** e)
        prod = xl * pad(g, order_hi)
        for beta, v in prod.coeffs.items():
            val = complex(float(to_iv(v).mid) if _is_iv(v) else float(v)) * complex(c)
            if beta.order <= N:
                acc[tuple(beta)] = acc.get(tuple(beta), 0) + val
            else:
                remainder += abs(val) * float(delta) ** beta.order
        if k >= 1:
            if k not in Snk:
                Snk[k] = _graph_remainder_sum(m, N, G.s, k)
            scale = math.prod((fams[i].sup_bound or 1.0) ** e for i, e in enumerate(rest) if e)
            xsize = math.prod((abs(float(center[i])) + delta) ** e for i, e in enumerate(lam))
            remainder += abs(c) * xsize * scale * C ** (N + 1) * float(delta) ** N * Snk[k]
        # interval widths of the jets are folded in as an absolute error
        for v in prod.coeffs.values():
            if _is_iv(v):
                remainder += abs(complex(c)) * float(endpoints(v)[1] - endpoints(v)[0]) * max(1.0, float(delta)) ** order_hi
    return Poly(m, acc, integer=False), remainder * (1 + 1e-12)


def remainder_log_estimate(s: float, t: float, N: int, C: float, delta: float | None = None, m: int = 1) -> float:
    """``log(C**(N+1) delta**N sum_{|a|=N+1} binom(a+N-1, a) (a!)**(s-1))``.

    The sum is evaluated exactly; asymptotically the value is ``(s-t) N log N``.
    """
    if not t > s:
        raise ValueError("requires t > s")
    if N < 1:
        raise ValueError("N must be positive")
    if delta is None:
        delta = N ** (1 - t)
    if C == 0:
        return -math.inf
    total = 0
    exact = float(s).is_integer()
    for a in multi_indices_of_order(m, N + 1):
        b = math.prod(math.comb(ai + N - 1, ai) for ai in a)
        if exact:
            total += b * a.factorial() ** (int(s) - 1)
        else:
            total += mpmath.mpf(b) * mpmath.mpf(a.factorial()) ** (s - 1)
    log_sum = float(mpmath.log(total))
    return (N + 1) * math.log(C) + N * math.log(delta) + log_sum
