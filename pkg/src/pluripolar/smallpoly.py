"""Integer polynomials that are exponentially small on a cloud.

A certificate is an integer polynomial ``P`` of degree at most ``N`` with
coefficients at most ``exp(N**h)`` and ``sup_X |P| < exp(-N**h)``.  Three
searches produce candidates (exhaustive enumeration, the pigeonhole
collision argument, lattice reduction); every candidate is re-checked with
directed-rounding interval arithmetic before it is returned.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import flint
import mpmath
import numpy as np
from mpmath import iv
from mpmath.libmp import from_man_exp

from .gevrey import PreconditionError, endpoints, iv_precision
from .polynomials import Poly, Polydisk, multi_indices
from .trace_space import PointCloud

STRATEGIES = ("exhaustive", "pigeonhole_meet", "lattice_reduce")
EXHAUSTIVE_LIMIT = 10 ** 7


class SearchNotFound(Exception):
    """No certificate within the budget; ``diagnosis`` says why."""

    def __init__(self, message: str, diagnosis: dict):
        super().__init__(message)
        self.diagnosis = diagnosis


class PrecisionError(Exception):
    """Working precision too low to decide a check either way."""


@dataclass
class PigeonholeParams:
    T: int
    log_T: float
    M: int | None
    log_M: float
    eps: mpmath.mpf
    log_eps: float
    log_normalizer: float
    monomials: int


def pigeonhole_params(N: int, h: float, n: int, R: float, exact_limit_bits: int = 1 << 16) -> PigeonholeParams:
    """``T = floor(exp(N**h))``, ``M = T**binom(N+n, n)``, the collision scale and the normaliser.

    ``M`` is returned exactly when it has at most ``exact_limit_bits`` bits,
    otherwise only ``log M``.
    """
    if not h > 1:
        raise ValueError("requires h > 1")
    if not R > 1:
        raise ValueError("requires R > 1")
    if N < 1 or n < 1:
        raise ValueError("requires N >= 1 and n >= 1")
    Nh = N ** h
    with mpmath.workprec(64 + int(Nh * 1.5)):
        T = int(mpmath.floor(mpmath.exp(mpmath.mpf(N) ** h)))
        eps = mpmath.mpf(1) / 2 * mpmath.exp(-2 * mpmath.mpf(N) ** h - N * mpmath.log(R) - n * mpmath.log(N))
    m = math.comb(N + n, n)
    log_T = math.log(T)
    log_M = m * log_T
    M = T ** m if log_M / math.log(2) <= exact_limit_bits else None
    log_eps = math.log(0.5) - 2 * Nh - N * math.log(R) - n * math.log(N)
    log_norm = -(n * math.log(N) + N * math.log(R) + Nh)
    return PigeonholeParams(T, log_T, M, log_M, eps, log_eps, log_norm, m)


@dataclass
class SmallPolyCertificate:
    P: Poly
    N: int
    h: float
    coeff_max: int
    supX: mpmath.mpf
    supD_lower: mpmath.mpf
    target: mpmath.mpf
    strategy: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def a(self) -> float:
        """``-log`` of the certified sup bound on the cloud."""
        return math.inf if self.supX == 0 else -float(mpmath.log(self.supX))

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "N": self.N, "h": self.h, "coeff_max": str(self.coeff_max),
                "supX": mpmath.nstr(self.supX, 20), "supD_lower": mpmath.nstr(self.supD_lower, 20),
                "target": mpmath.nstr(self.target, 20), "a": self.a, "strategy": self.strategy,
                "extra": self.extra}


@dataclass
class SearchConfig:
    strategy: str = "lattice_reduce"
    N: int = 4
    h: float = 1.5
    precision_bits: int = 256
    budget: int = 10 ** 5
    time_budget: float | None = None
    B: int = 1
    R: float = 2.0
    scales: Sequence[float] | None = None
    keep_rows: int = 8

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.N < 1:
            raise ValueError("N must be at least 1")

    def required_bits(self) -> int:
        return math.ceil(2 * self.N ** self.h / math.log(2))


# interval evaluation ----------------------------------------------------

def _point_iv(z):
    z = complex(z)
    return iv.mpc(z.real, z.imag) if z.imag else iv.mpf(z.real)


def _to_iv(c):
    if isinstance(c, Fraction):
        return iv.mpf(c.numerator) / c.denominator
    if isinstance(c, complex):
        return _point_iv(c)
    return iv.mpf(c)


def _abs_iv(v):
    if isinstance(v, iv.mpc):
        return iv.sqrt(v.real ** 2 + v.imag ** 2)
    return abs(v)


def _acb_coeff(c):
    if isinstance(c, int):
        return flint.acb(flint.fmpz(c))
    if isinstance(c, Fraction):
        return flint.acb(flint.fmpq(c.numerator, c.denominator))
    if isinstance(c, (float, complex)):
        c = complex(c)
        return flint.acb(c.real, c.imag)
    return None


def _exact_mpf(x: "flint.arb"):
    m, e = x.man_exp()
    return mpmath.mp.make_mpf(from_man_exp(int(m), int(e)))


def sup_on_cloud_iv(P: Poly, points: np.ndarray, bits: int):
    """Enclosure ``(lo, hi)`` of ``max_p |P(p)|`` over the cloud."""
    coeffs = [(alpha, _acb_coeff(c)) for alpha, c in P.terms.items()]
    if any(c is None for _, c in coeffs):
        return _sup_on_cloud_mpiv(P, points, bits)
    # arb ball arithmetic; endpoints are exact binary numbers
    deg = max(P.degree, 0)
    old = flint.ctx.prec
    flint.ctx.prec = bits
    try:
        lo = hi = flint.arb(0)
        for z in np.atleast_2d(points):
            pw = []
            for c in z:
                c = complex(c)
                row = [flint.acb(1)]
                v = flint.acb(c.real, c.imag)
                for _ in range(deg):
                    row.append(row[-1] * v)
                pw.append(row)
            val = flint.acb(0)
            for alpha, c in coeffs:
                t = c
                for j, a in enumerate(alpha):
                    if a:
                        t = t * pw[j][a]
                val += t
            m = abs(val)
            lo, hi = max(lo, m.lower()), max(hi, m.upper())
        return _exact_mpf(lo), _exact_mpf(hi)
    finally:
        flint.ctx.prec = old


def _sup_on_cloud_mpiv(P: Poly, points: np.ndarray, bits: int):
    lo = hi = mpmath.mpf(0)
    with iv_precision(bits):
        for z in np.atleast_2d(points):
            v = _abs_iv(P.evaluate_mp([_point_iv(c) for c in z], ctx=iv))
            a, b = endpoints(v)
            lo, hi = max(lo, a), max(hi, b)
    return lo, hi


def _recentred_iv(P: Poly, center: Sequence[complex]) -> dict:
    """Coefficients of ``P(center + u)`` in ``u`` as interval numbers."""
    if not any(complex(a) for a in center):
        return {alpha: _to_iv(coef) for alpha, coef in P.terms.items()}
    out: dict = {}
    c = [_point_iv(a) for a in center]
    for alpha, coef in P.terms.items():
        ranges = [range(a + 1) for a in alpha]
        for beta in itertools.product(*ranges):
            term = iv.mpf(coef)
            for j, (a, b) in enumerate(zip(alpha, beta)):
                if a - b:
                    term = term * math.comb(a, b) * c[j] ** (a - b)
            out[beta] = out.get(beta, 0) + term
    return out


def sup_lower_on_polydisk(P: Poly, D: Polydisk, bits: int = 128, grid: int = 16):
    """Certified lower bound on ``sup_D |P|``.

    Parseval on the distinguished boundary gives ``sqrt(sum |c'_a|**2 R**(2|a|))``
    for the recentred coefficients; sampled torus values are also lower
    bounds.  The larger is returned.
    """
    with iv_precision(bits):
        coeffs = _recentred_iv(P, D.center)
        R = iv.mpf(D.radius)
        total = iv.mpf(0)
        for beta, c in coeffs.items():
            total += _abs_iv(c) ** 2 * R ** (2 * sum(beta))
        parseval = endpoints(iv.sqrt(total))[0] if endpoints(total)[0] > 0 else mpmath.mpf(0)
    torus = D.torus(grid) if D.dim <= 2 else D.torus(4)
    lo, _ = sup_on_cloud_iv(P, torus, bits)
    return max(parseval, lo)


def verify_report(cert: SmallPolyCertificate, X: PointCloud, D: Polydisk | None = None,
                  precision_bits: int | None = None) -> dict:
    """All certificate checks with their outcome; see :func:`verify_certificate`."""
    P, N, h = cert.P, cert.N, cert.h
    bits = precision_bits or max(128, math.ceil(2 * N ** h / math.log(2)) + 64)
    need = 2 * N ** h / math.log(2)
    if bits < need:
        raise PrecisionError(f"{bits} bits requested, at least {math.ceil(need)} needed for N={N}, h={h}")
    if D is None:
        D = Polydisk((0,) * X.ambient_dim, 1.0)
    reasons = []
    if not P.integer:
        reasons.append("coefficients are not integers")
    if P.is_constant:
        reasons.append("non-constant polynomial required")
    if P.degree > N:
        reasons.append(f"degree {P.degree} exceeds N={N}")
    with iv_precision(bits):
        Nh = iv.mpf(N) ** iv.mpf(h)
        big_lo, big_hi = endpoints(iv.exp(Nh))
        tgt_lo, tgt_hi = endpoints(iv.exp(-Nh))
    cmax = max((abs(c) for c in P.terms.values()), default=0)
    if cmax > big_hi:
        reasons.append("coefficient bound exp(N^h) exceeded")
    elif cmax > big_lo:
        raise PrecisionError("coefficient bound undecidable at this precision")
    lo, hi = sup_on_cloud_iv(P, X.points, bits)
    if lo >= tgt_hi:
        reasons.append("sup on X not below exp(-N^h)")
    elif hi >= tgt_lo:
        raise PrecisionError("sup on X too close to exp(-N^h) to decide")
    supD = sup_lower_on_polydisk(P, D, bits) if P.terms else mpmath.mpf(0)
    if supD < 1:
        reasons.append("sup over D below 1")
    return {"ok": not reasons, "reasons": reasons, "supX_hi": hi, "supX_lo": lo, "supD_lower": supD,
            "target_lo": tgt_lo, "coeff_max": cmax, "bits": bits}


def verify_certificate(cert: SmallPolyCertificate, X: PointCloud, D: Polydisk | None = None,
                       precision_bits: int | None = None) -> bool:
    """True only if degree, coefficient, sup-on-``X`` and sup-on-``D`` checks all pass.

    Raises :class:`PrecisionError` instead of guessing when the working
    precision cannot separate a value from its threshold.
    """
    return verify_report(cert, X, D, precision_bits)["ok"]


def _certificate(P: Poly, X: PointCloud, N: int, h: float, strategy: str, bits: int,
                 D: Polydisk | None = None, **extra) -> SmallPolyCertificate | None:
    probe = SmallPolyCertificate(P, N, h, 0, mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0), strategy)
    try:
        rep = verify_report(probe, X, D, bits)
    except PrecisionError:
        return None
    if not rep["ok"]:
        return None
    with iv_precision(bits):
        target = endpoints(iv.exp(-(iv.mpf(N) ** iv.mpf(h))))[0]
    return SmallPolyCertificate(P, N, h, int(rep["coeff_max"]), rep["supX_hi"], rep["supD_lower"], target,
                                strategy, dict(extra, bits=bits))


def _poly(coeffs: Sequence[int], alphas, n: int) -> Poly:
    return Poly(n, {tuple(a): int(c) for a, c in zip(alphas, coeffs) if c}, integer=True)


def _nonconstant(coeffs: Sequence[int], alphas) -> bool:
    return any(c and sum(a) > 0 for c, a in zip(coeffs, alphas))


# strategies -------------------------------------------------------------

def _exhaustive(X: PointCloud, cfg: SearchConfig, alphas, bits: int) -> SmallPolyCertificate:
    m, n = len(alphas), X.ambient_dim
    count = (2 * cfg.B + 1) ** m
    if count > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive search over {count} candidates exceeds the limit {EXHAUSTIVE_LIMIT}")
    alphabet = [0] + [s * b for b in range(1, cfg.B + 1) for s in (1, -1)]
    V = np.stack([Poly.monomial(a).evaluate_many(X.points) for a in alphas], axis=1)
    target = math.exp(-cfg.N ** cfg.h)
    absV = np.abs(V)
    it = itertools.product(alphabet, repeat=m)
    tried = 0
    while True:
        chunk = np.array(list(itertools.islice(it, 200_000)), dtype=float)
        if chunk.size == 0:
            break
        tried += len(chunk)
        vals = np.abs(chunk @ V.T).max(axis=1)
        slack = (np.abs(chunk) @ absV.T).max(axis=1) * 1e-14
        for i in np.flatnonzero(vals <= target + slack):
            c = [int(v) for v in chunk[i]]
            if not _nonconstant(c, alphas):
                continue
            cert = _certificate(_poly(c, alphas, n), X, cfg.N, cfg.h, "exhaustive", bits, candidates=tried)
            if cert is not None:
                return cert
    raise SearchNotFound("exhaustive search exhausted", {"candidates": tried, "B": cfg.B,
                                                          "budget_hit": False})


def _pigeonhole(X: PointCloud, cfg: SearchConfig, alphas, bits: int) -> SmallPolyCertificate:
    n, N, h = X.ambient_dim, cfg.N, cfg.h
    par = pigeonhole_params(N, h, n, cfg.R)
    m = len(alphas)
    with mpmath.workprec(bits + 64):
        vals = [[Poly.monomial(a).evaluate_mp(list(map(mpmath.mpmathify, z))) for z in X.points] for a in alphas]
        scale = mpmath.exp(mpmath.mpf(par.log_normalizer)) / par.eps
        vals = [[v * scale for v in row] for row in vals]
        seen: dict = {}
        tried = 0
        for c in itertools.product(range(1, par.T + 1), repeat=m):
            if tried >= cfg.budget:
                break
            tried += 1
            key = []
            for p in range(len(X)):
                v = mpmath.fsum(ci * vals[i][p] for i, ci in enumerate(c))
                key.append(int(mpmath.floor(mpmath.re(v))))
                key.append(int(mpmath.floor(mpmath.im(v))))
            key = tuple(key)
            other = seen.get(key)
            if other is None:
                seen[key] = c
                continue
            diff = [a - b for a, b in zip(c, other)]
            if not _nonconstant(diff, alphas):
                continue
            cert = _certificate(_poly(diff, alphas, n), X, N, h, "pigeonhole_meet", bits,
                                candidates=tried, T=par.T)
            if cert is not None:
                return cert
    # every box holds traces whose normalised values differ by at most sqrt(2) eps
    log_boxes = 2 * len(X) * math.log(2 * m * par.T * math.exp(par.log_normalizer - par.log_eps) + 1)
    raise SearchNotFound("pigeonhole search found no usable collision", {
        "candidates": tried, "budget_hit": tried >= cfg.budget, "log_M": par.log_M,
        "log_boxes": log_boxes, "existence_guaranteed": par.log_M > log_boxes, "T": par.T})


def _value_columns(X: PointCloud, alphas, bits: int) -> list[list]:
    """Per monomial, the real (and imaginary, if any point is non-real) parts on the cloud."""
    real = bool(np.all(X.points.imag == 0))
    rows = []
    with mpmath.workprec(bits):
        for a in alphas:
            row = []
            for z in X.points:
                v = mpmath.mpf(1) if real else mpmath.mpc(1)
                for zj, e in zip(z, a):
                    if e:
                        base = mpmath.mpf(zj.real) if real else mpmath.mpc(zj.real, zj.imag)
                        v *= base ** e
                if real:
                    row.append(v)
                else:
                    row.extend([v.real, v.imag])
            rows.append(row)
    return rows


def _lattice(X: PointCloud, cfg: SearchConfig, alphas, bits: int) -> SmallPolyCertificate:
    n, N, h = X.ambient_dim, cfg.N, cfg.h
    m = len(alphas)
    Nh = N ** h
    scales = list(cfg.scales or np.arange(1.0, 7.01, 0.5))
    work = max(bits, int(max(scales) * Nh / math.log(2)) + 96)
    cols = _value_columns(X, alphas, work)
    width = len(cols[0])
    fix_bits = work
    with mpmath.workprec(work + 16):
        Vfix = flint.fmpz_mat([[int(mpmath.nint(mpmath.ldexp(v, fix_bits))) for v in row] for row in cols])
    log_target = -Nh
    t0 = time.time()

    def run(col_idx):
        U = flint.fmpz_mat([[int(i == j) for j in range(m)] for i in range(m)])
        best: list = []
        for f in scales:
            if cfg.time_budget and time.time() - t0 > cfg.time_budget:
                break
            with mpmath.workprec(work):
                S = mpmath.exp(f * Nh)
                Vs = flint.fmpz_mat([[int(mpmath.nint(S * cols[i][j])) for j in col_idx] for i in range(m)])
            right = U * Vs
            basis = flint.fmpz_mat([[U[i, j] for j in range(m)] + [right[i, j] for j in range(len(col_idx))]
                                    for i in range(m)])
            red = basis.lll()
            U = flint.fmpz_mat([[red[i, j] for j in range(m)] for i in range(m)])
            rows = [[int(U[i, j]) for j in range(m)] for i in range(min(cfg.keep_rows, m))]
            small_enough = False
            for c in rows:
                if not _nonconstant(c, alphas):
                    continue
                cmax = max(abs(v) for v in c)
                if math.log(cmax) > Nh:
                    continue
                small_enough = True
                vals = flint.fmpz_mat([c]) * Vfix
                err = sum(abs(v) for v in c)
                peak = max(abs(int(vals[0, j])) for j in range(width)) + err
                mag = peak if width == len(X) else peak * 2
                if mag == 0:
                    a_est = math.inf
                else:
                    a_est = -(math.log(mag) - fix_bits * math.log(2))
                if a_est > -log_target:
                    best.append((a_est, f, c))
            if not small_enough:
                break
        return best

    idx_all = list(range(width))
    stride = max(1, width // (2 * m + 16))
    idx = idx_all[::stride] if stride > 1 else idx_all
    found = run(idx)
    if not found and idx != idx_all:
        found = run(idx_all)
    found.sort(key=lambda t: -t[0])
    for a_est, f, c in found:
        # enough bits to resolve the cancellation down to exp(-a) with coefficients of size max|c|
        need = math.ceil((a_est + math.log(max(abs(v) for v in c) * m)) / math.log(2)) + 64
        cert = _certificate(_poly(c, alphas, n), X, N, h, "lattice_reduce", max(bits, need),
                            scale=float(f), a_estimate=a_est)
        if cert is not None:
            return cert
    raise SearchNotFound("lattice reduction found no verified certificate", {
        "candidates": len(found), "budget_hit": bool(cfg.time_budget and time.time() - t0 > cfg.time_budget),
        "scales": scales, "note": "existence is only guaranteed for N beyond an unknown N0(h)"})


def search_small_poly(X: PointCloud, cfg: SearchConfig) -> SmallPolyCertificate:
    """Search for a certificate; raises :class:`SearchNotFound` with a diagnosis."""
    if len(X) == 0:
        raise ValueError("empty cloud")
    bits = cfg.precision_bits
    if bits < cfg.required_bits():
        raise PrecisionError(f"precision {bits} bits below the required {cfg.required_bits()}")
    alphas = multi_indices(X.ambient_dim, cfg.N)
    if cfg.strategy == "exhaustive":
        return _exhaustive(X, cfg, alphas, bits)
    if cfg.strategy == "pigeonhole_meet":
        return _pigeonhole(X, cfg, alphas, bits)
    return _lattice(X, cfg, alphas, bits)


def minimal_success_N(X: PointCloud, cfg: SearchConfig, N_values: Sequence[int]) -> int | None:
    """Smallest ``N`` in ``N_values`` for which the search succeeds."""
    for N in N_values:
        try:
            search_small_poly(X, SearchConfig(**{**cfg.__dict__, "N": N}))
            return N
        except SearchNotFound:
            continue
    return None


# pluripolarity evidence -------------------------------------------------

@dataclass
class EvidenceVerdict:
    evidence: str
    ks: list
    a: list
    ratios: list
    bounds_hold: list
    increasing: bool
    last_over_first: float
    label: str = "finite-range evidence only; the limit a_k/k -> infinity is not proved"

    def to_json(self) -> dict:
        return self.__dict__.copy()


def certify_pluripolarity_evidence(family: Sequence, X: PointCloud, precision_bits: int = 256,
                                   min_ratio: float = 4.0) -> EvidenceVerdict:
    """Check ``sup_X |P_k| <= exp(-a_k)`` and the growth of ``a_k / k``.

    ``family`` holds ``(P_k, a_k)`` pairs (``k = deg P_k``) or ``(k, P_k, a_k)``
    triples.  Each ``P_k`` must satisfy ``sup |P_k| >= 1`` on the unit
    polydisk.  The verdict is "yes" when every bound holds and ``a_k / k`` is
    strictly increasing with last/first ratio at least ``min_ratio``.
    """
    if not family:
        raise ValueError("empty family")
    items = []
    for entry in family:
        if len(entry) == 3:
            k, P, a = entry
        else:
            P, a = entry
            k = P.degree
        items.append((int(k), P, float(a)))
    ks = [k for k, _, _ in items]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k values must be strictly increasing")
    n = items[0][1].nvars
    unit = Polydisk((0,) * n, 1.0)
    bounds_hold = []
    for k, P, a in items:
        if P.degree > k:
            raise PreconditionError(f"P_{k} has degree {P.degree} > {k}")
        # resolve the cancellation down to exp(-a) against coefficients of size max|c|
        cmax = max((abs(c) for c in P.terms.values()), default=1)
        bits = max(precision_bits, math.ceil((a + math.log(float(cmax) * len(P.terms) + 1)) / math.log(2)) + 64)
        if sup_lower_on_polydisk(P, unit, bits) < 1:
            raise PreconditionError(f"P_{k} is not normalised: sup on the unit polydisk may be below 1")
        _, hi = sup_on_cloud_iv(P, X.points, bits)
        with iv_precision(bits):
            bound_lo = endpoints(iv.exp(-iv.mpf(a)))[0]
        bounds_hold.append(bool(hi <= bound_lo))
    ratios = [a / k for k, _, a in items]
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    lof = ratios[-1] / ratios[0] if ratios[0] > 0 else math.inf
    yes = all(bounds_hold) and increasing and len(items) >= 2 and lof >= min_ratio
    return EvidenceVerdict("yes" if yes else "no", ks, [a for _, _, a in items], ratios, bounds_hold, increasing, lof)
