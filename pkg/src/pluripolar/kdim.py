"""Finite-range estimates of the Kolmogorov dimension ``Psi(X, D)``.

``Psi`` is the limiting exponent in ``H_eps ~ (log 1/eps)**(Psi + 1)``.  At
practical eps ``H_eps`` carries lower-order terms (``L log L`` with
``L = log 1/eps`` for a disk) that bias a plain log-log slope, so the fit
here models ``log H = p log(L + L0) + b`` with a fitted shift ``L0``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .metric_entropy import EntropyReport
from .polynomials import Poly
from .trace_space import PointCloud, apply_poly_map, entropy_lower, entropy_upper

FIT_TOL = 0.2


@dataclass
class EpsSchedule:
    eps: list
    samples: int = 200
    seed: int = 0

    def __post_init__(self):
        self.eps = [float(e) for e in self.eps]
        if len(self.eps) < 4:
            raise ValueError("a schedule needs at least 4 eps values")
        if any(b >= a for a, b in zip(self.eps, self.eps[1:])):
            raise ValueError("eps values must be strictly decreasing")
        if self.eps[-1] <= 0:
            raise ValueError("eps values must be positive")

    @classmethod
    def logspaced(cls, eps_max=1e-2, eps_min=1e-5, count=10, samples=200, seed=0) -> "EpsSchedule":
        return cls(list(np.logspace(math.log10(eps_max), math.log10(eps_min), count)), samples, seed)

    @classmethod
    def from_json(cls, doc: dict) -> "EpsSchedule":
        return cls(doc["eps"], int(doc.get("samples", 200)), int(doc.get("seed", 0)))


@dataclass
class PsiEstimate:
    psi_upper: float
    psi_lower: float
    fit: dict
    eps_range: list
    points_used: int
    reports: list = field(default_factory=list)

    def __post_init__(self):
        if self.psi_lower > self.psi_upper:
            raise ValueError("psi_lower exceeds psi_upper")

    def to_json(self) -> dict:
        d = asdict(self)
        d["reports"] = [r.to_json() for r in self.reports]
        return d


def _weights(m: int) -> np.ndarray:
    # the three smallest eps carry double weight (they sit closest to the limsup)
    w = np.ones(m)
    w[-3:] = 2.0
    return w


def fit_exponent(eps: Sequence[float], H: Sequence[float], shifts: int = 401) -> dict:
    """Fit ``log H = p log(L + L0) + b`` over ``L0 in [0, min L]``.

    Returns the exponent ``p`` with diagnostics: the plain slope (``L0 = 0``),
    the slope through the three smallest eps, and weighted residuals.
    """
    eps = np.asarray(eps, float)
    H = np.asarray(H, float)
    keep = (H > 0) & np.isfinite(H)
    eps, H = eps[keep], H[keep]
    if eps.size < 4:
        raise ValueError("insufficient schedule: fewer than 4 usable points")
    order = np.argsort(-eps)
    eps, H = eps[order], H[order]
    L = np.log(1 / eps)
    y = np.log(H)
    w = _weights(L.size)
    best = None
    for L0 in np.linspace(0.0, L.min(), shifts):
        x = np.log(L + L0)
        p, b = np.polyfit(x, y, 1, w=np.sqrt(w))
        res = y - (p * x + b)
        sse = float(np.sum(w * res ** 2))
        if best is None or sse < best[0] - 1e-15:
            best = (sse, p, b, L0, res)
    sse, p, b, L0, res = best
    plain = float(np.polyfit(np.log(L), y, 1, w=np.sqrt(w))[0])
    tail = float(np.polyfit(np.log(L[-3:]), y[-3:], 1)[0])
    return {"slope": float(p), "intercept": float(b), "shift": float(L0),
            "residuals": [float(v) for v in res], "sse": sse,
            "plain_slope": plain, "tail_slope": tail}


def _reports(X: PointCloud, sched: EpsSchedule, lower: bool, threads: int):
    def one(i_eps):
        i, e = i_eps
        up = entropy_upper(X, e)
        lo = entropy_lower(X, e, sched.samples, sched.seed + i) if lower else None
        return up, lo

    items = list(enumerate(sched.eps))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(one, items))
    return [one(it) for it in items]


def estimate_psi(X: PointCloud, sched: EpsSchedule, lower: bool = True, threads: int = 1) -> PsiEstimate:
    """Fit ``Psi`` from upper (and optionally sampled lower) entropy bounds.

    Lower bounds saturate at ``log(samples)`` once all sampled traces are
    eps-distinguishable; their fit is reported but clipped to ``psi_upper``
    (the unclipped value is kept in the fit record).
    """
    pairs = _reports(X, sched, lower, threads)
    ups = [p[0] for p in pairs]
    fit_up = fit_exponent([r.eps for r in ups], [r.h_upper for r in ups])
    psi_up = fit_up["slope"] - 1
    fit = {"upper": fit_up}
    psi_lo = -1.0
    reports: list[EntropyReport] = list(ups)
    if lower:
        lows = [p[1] for p in pairs]
        reports += lows
        try:
            fit_lo = fit_exponent([r.eps for r in lows], [r.h_lower for r in lows])
            fit["lower"] = fit_lo
            psi_lo = fit_lo["slope"] - 1
        except ValueError:
            fit["lower"] = None
        fit["psi_lower_raw"] = psi_lo
    used = sum(1 for r in ups if r.h_upper > 0)
    return PsiEstimate(psi_up, min(psi_lo, psi_up), fit, [min(sched.eps), max(sched.eps)], used, reports)


def section5_bound(N: int, m: int, t: float, s: float, C: float) -> dict:
    """Explicit covering bound for a Gevrey graph at scale ``eps = N**(-a N)``.

    ``(1/delta)**m`` balls of radius ``delta = N**(1-t)`` cover the parameter
    box; on each, ``binom(N+m, N)`` Taylor coefficients bounded by
    ``C**N (N!)**(s-1)`` are gridded at ``eps`` in real and imaginary part.
    """
    if not t > s:
        raise ValueError("requires t > s")
    if s < 1 or m < 0 or N < 2:
        raise ValueError("requires s >= 1, m >= 0, N >= 2")
    a = (t - s) / 2
    logN = math.log(N)
    delta = N ** (1 - t)
    log_eps = -a * N * logN
    log_coeff = N * math.log(C) + (s - 1) * math.lgamma(N + 1) if C > 0 else -math.inf
    grid = float(np.logaddexp(log_coeff - log_eps, 0.0))
    H = delta ** (-m) * 2 * math.comb(N + m, N) * grid
    return {"H": H, "delta": delta, "eps": math.exp(log_eps), "log_eps": log_eps, "a": a,
            "normalized": H / (N ** (m * t + 1) * logN)}


def section5_N_for_eps(eps: float, t: float, s: float, N_min: int = 2) -> int:
    """Smallest ``N`` whose scale ``N**(-aN)`` is at most ``eps``."""
    a = (t - s) / 2
    N = N_min
    while -a * N * math.log(N) > math.log(eps):
        N += 1
    return N


def kdim_gevrey_upper(m: int, s: float) -> float:
    if m < 1 or s < 1:
        raise ValueError("requires m >= 1 and s >= 1")
    return m * s


def predicts_pluripolar(m: int, s: float, n: int) -> bool:
    """A Gevrey-``s`` graph of real dimension ``m`` in ``C^n`` is pluripolar when ``ms < n``."""
    return kdim_gevrey_upper(m, s) < n


def property_harness(X1: PointCloud, X2: PointCloud, sched: EpsSchedule,
                     phi: Sequence[Poly] | None = None, tol: float = FIT_TOL) -> dict:
    """Subset monotonicity, union max-rule and polynomial-image bound for ``Psi``.

    The subset is every other point of ``X1`` inside ``X1``'s polydisks; the
    image map defaults to ``z -> (z_1, z_1**2, ...)`` style squaring of each
    coordinate appended to the identity.
    """
    if X1.ambient_dim != X2.ambient_dim:
        raise ValueError("clouds must share the ambient dimension")
    n = X1.ambient_dim

    def psi(X):
        return estimate_psi(X, sched, lower=False).psi_upper

    p1, p2 = psi(X1), psi(X2)
    sub = X1.subset(np.arange(0, len(X1), 2))
    p_sub = psi(sub)
    p_union = psi(X1.union(X2))
    if phi is None:
        phi = [Poly.variable(j, n) for j in range(n)] + [Poly.variable(j, n) ** 2 for j in range(n)]
    p_img = psi(apply_poly_map(X1, phi))
    out = {
        "psi": {"X1": p1, "X2": p2, "subset": p_sub, "union": p_union, "image": p_img},
        "subset_monotone": {"gap": p_sub - p1, "pass": p_sub <= p1 + tol},
        "union_max": {"gap": p_union - max(p1, p2), "pass": abs(p_union - max(p1, p2)) <= tol},
        "image_bound": {"gap": p_img - p1, "pass": p_img <= p1 + tol},
        "tol": tol,
    }
    out["pass"] = all(out[k]["pass"] for k in ("subset_monotone", "union_max", "image_bound"))
    return out
