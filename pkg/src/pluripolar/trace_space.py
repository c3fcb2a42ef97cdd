"""Discretised trace spaces ``A_X^D``.

``A_X^D`` is the set of restrictions to a finite cloud ``X`` of functions
holomorphic on a polydisk ``D = Delta(a, R)`` and bounded there by 1.  Upper
entropy bounds come from Taylor surrogates around the polydisk centre, lower
bounds from packings of random normalised polynomials.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metric_entropy import EntropyReport, FiniteMetricSpace, _pack_indices
from .polynomials import (Poly, Polydisk, cauchy_coeff_bound, multi_indices,
                          sup_on_polydisk, taylor_truncation_bound)


class PointCloud:
    """Finite sample of a compact set in ``C^n`` inside ``Delta(a, r') c Delta(a, R)``."""

    def __init__(self, points, enclosing: Polydisk, inner_radius: float, label: str = ""):
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        if pts.shape[0] == 0:
            raise ValueError("empty point cloud")
        if pts.shape[1] != enclosing.dim:
            raise ValueError(f"points have dimension {pts.shape[1]}, enclosing polydisk {enclosing.dim}")
        if not 0 <= inner_radius < enclosing.radius:
            raise ValueError(f"inner radius {inner_radius} must lie in [0, R={enclosing.radius})")
        dist = np.abs(pts - np.asarray(enclosing.center)).max()
        if dist > inner_radius * (1 + 1e-12) + 1e-300:
            raise ValueError(f"cloud reaches distance {dist} > inner radius {inner_radius}")
        self.points = pts
        self.enclosing = enclosing
        self.inner_radius = float(inner_radius)
        self.label = label

    @classmethod
    def from_points(cls, points, R: float | None = None, center=None, inner_factor: float = 1.0,
                    label: str = "") -> "PointCloud":
        """Cloud with centre at the bounding-box midpoint unless ``center`` is given.

        ``R`` defaults to four times the inner radius (1 for a single point).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        if center is None:
            lo_re, hi_re = pts.real.min(axis=0), pts.real.max(axis=0)
            lo_im, hi_im = pts.imag.min(axis=0), pts.imag.max(axis=0)
            center = (lo_re + hi_re) / 2 + 1j * (lo_im + hi_im) / 2
        center = np.atleast_1d(np.asarray(center, dtype=complex))
        rp = float(np.abs(pts - center).max()) * inner_factor
        if R is None:
            R = 4 * rp if rp > 0 else 1.0
        return cls(pts, Polydisk(center, R), rp, label)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def R(self) -> float:
        return self.enclosing.radius

    def __len__(self):
        return self.points.shape[0]

    def local(self) -> np.ndarray:
        """Points relative to the polydisk centre."""
        return self.points - np.asarray(self.enclosing.center)

    def with_radius(self, R: float) -> "PointCloud":
        return PointCloud(self.points, Polydisk(self.enclosing.center, R), self.inner_radius, self.label)

    def subset(self, idx) -> "PointCloud":
        """Sub-cloud sharing this cloud's polydisks (so entropy can only drop)."""
        return PointCloud(self.points[idx], self.enclosing, self.inner_radius, self.label)

    def union(self, other: "PointCloud", R: float | None = None) -> "PointCloud":
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("clouds live in different dimensions")
        pts = np.concatenate([self.points, other.points])
        pts = pts[np.sort(np.unique(np.round(pts, 15), axis=0, return_index=True)[1])]
        return PointCloud.from_points(pts, R=R or max(self.R, other.R))

    def to_json(self) -> dict:
        rows = [[float(v) for z in row for v in (z.real, z.imag)] for row in self.points]
        c = self.enclosing.center
        return {"ambient_dim": self.ambient_dim, "points": rows, "metric": "sup",
                "enclosing": {"center": [[z.real, z.imag] for z in c], "radius": self.R},
                "inner_radius": self.inner_radius}

    @classmethod
    def from_json(cls, doc: dict | str, R: float | None = None) -> "PointCloud":
        if isinstance(doc, str):
            doc = json.loads(doc)
        n = int(doc["ambient_dim"])
        pts = np.asarray(doc["points"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 * n:
            raise ValueError(f"each point needs {2 * n} reals (re, im pairs) for ambient_dim={n}")
        pts = pts[:, 0::2] + 1j * pts[:, 1::2]
        enc = doc.get("enclosing")
        if enc is None:
            return cls.from_points(pts, R=R)
        center = [complex(a, b) for a, b in enc["center"]]
        rp = doc.get("inner_radius")
        if rp is None:
            rp = float(np.abs(pts - np.asarray(center)).max())
        return cls(pts, Polydisk(center, R or enc["radius"]), rp)


class TraceVector:
    """Values of a function on a cloud, compared in the sup-metric."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = np.asarray(values, dtype=complex).ravel()

    def __len__(self):
        return self.values.size

    def distance(self, other: "TraceVector") -> float:
        if len(other) != len(self):
            raise ValueError("trace vectors of different length")
        return float(np.abs(self.values - other.values).max())

    @classmethod
    def of(cls, P: Poly, X: PointCloud, local: bool = True) -> "TraceVector":
        return cls(P.evaluate_many(X.local() if local else X.points))


@dataclass
class SurrogateModel:
    """Taylor surrogate of ``A_X^D`` at accuracy ``eps``.

    ``coeff_boxes[alpha]`` is the Cauchy radius ``R**-|alpha|`` of the Taylor
    coefficient of ``(z - a)**alpha``.
    """

    eps: float
    k: int
    R: float
    inner_radius: float
    nvars: int
    L: float
    coeff_boxes: dict = field(default_factory=dict)
    eps_budget: dict = field(default_factory=dict)
    tail: float = 0.0

    @property
    def alphas(self):
        return list(self.coeff_boxes)


def polydisk_tail(R: float, r: float, k: int, n: int) -> float:
    """``sum_{|alpha| > k} (r/R)**|alpha|``: Cauchy tail of a bounded function on ``Delta(r)^n``."""
    rho = r / R
    if rho == 0:
        return 0.0
    if not rho < 1:
        return math.inf
    total, j = 0.0, k + 1
    term = math.comb(j + n - 1, n - 1) * rho ** j
    while term > 1e-18 * max(total, 1e-300) or j <= k + 2 * n:
        total += term
        j += 1
        term = math.comb(j + n - 1, n - 1) * rho ** j
    return total * (1 + 1e-12)


def build_surrogate(X: PointCloud, eps: float) -> SurrogateModel:
    """Smallest degree whose truncation error on the cloud is at most ``eps/3``.

    Both the one-variable estimate ``(r'/R)**k / (R - r')`` and the polydisk
    Cauchy tail must fit in the budget; the second is what certifies the
    bound for ``n > 1``.
    """
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    R, rp, n = X.R, X.inner_radius, X.ambient_dim
    third = eps / 3
    budget = {"truncation": third, "grid": third, "slack": third}
    if rp == 0:
        return SurrogateModel(eps, 0, R, 0.0, n, 0.0, {(0,) * n: 1.0}, budget, 0.0)
    k = 0
    while taylor_truncation_bound(R, rp, k, 1.0) > third or polydisk_tail(R, rp, k, n) > third:
        k += 1
    boxes = {tuple(a): cauchy_coeff_bound(R, a) for a in multi_indices(n, k)}
    L = 1 / math.log(R / rp)
    return SurrogateModel(eps, k, R, rp, n, L, boxes, budget, polydisk_tail(R, rp, k, n))


def ncells(rho) -> np.ndarray:
    """Squares of circumradius ``w`` needed to cover a complex disk of radius ``rho*w``.

    Minimum of the bounding-square count and an area count of squares that
    can meet the disk.  One cell suffices when ``rho <= 1``.
    """
    rho = np.asarray(rho, dtype=float)
    square = np.ceil(np.sqrt(2) * rho - 1e-12) ** 2
    area = np.floor(np.pi * (rho + 2) ** 2 / 2)
    out = np.minimum(square, area)
    return np.where(rho <= 1, 1.0, np.maximum(out, 1.0))


def _allocate(influence: np.ndarray, budget: float):
    """Spend ``budget`` over coordinates with given ``bound * sup-influence``.

    Coordinates beyond the ``q`` largest are dropped (they cost their full
    influence); the kept ones share the rest equally.  Returns the best
    ``(h, q, w)`` over ``q``.
    """
    order = np.argsort(-influence, kind="stable")
    bu = influence[order]
    tail = np.concatenate([np.cumsum(bu[::-1])[::-1][1:], [0.0]])
    best = None
    for q in range(1, bu.size + 1):
        dropped = tail[q - 1]
        if dropped >= budget:
            continue
        w = (budget - dropped) / q
        h = float(np.sum(np.log(ncells(bu[:q] / w))))
        if best is None or h < best[0]:
            best = (h, q, w)
    if best is None:  # everything fits without gridding
        return 0.0, 0, budget, order
    return best + (order,)


def _count(influence: np.ndarray, budget: float) -> tuple[int, float, int]:
    h, q, w, order = _allocate(influence, budget)
    if q == 0:
        return 1, 0.0, 0
    cells = ncells(influence[order[:q]] / w)
    return math.prod(int(c) for c in cells), h, q


def _monomial_matrix(pts: np.ndarray, alphas) -> np.ndarray:
    cols = []
    for a in alphas:
        v = np.ones(pts.shape[0], dtype=complex)
        for j, e in enumerate(a):
            if e:
                v = v * pts[:, j] ** e
        cols.append(v)
    return np.stack(cols, axis=1)


def entropy_upper(X: PointCloud, eps: float, method: str = "auto") -> EntropyReport:
    """Certified upper bound on ``H_eps(A_X^D)``.

    ``grid`` quantises each Taylor coefficient in a box scaled by its trace
    influence ``r'**|alpha|``.  ``reduced`` quantises singular coordinates
    of the weighted evaluation map on the cloud instead, which exploits
    low-dimensional clouds.  ``auto`` returns the smaller of the two.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    n = X.ambient_dim
    if eps >= 1:
        # every trace lies within 1 of the zero trace
        return EntropyReport(eps, 1, 1, 0.0, 0.0, "grid", {"k": 0})
    sur = build_surrogate(X, eps)
    if sur.inner_radius == 0:
        count = int(ncells(1 / eps))
        return EntropyReport(eps, count, 1, math.log(count), 0.0, "grid", {"k": 0, "singleton": True})
    budget = eps / 3
    alphas = sur.alphas
    orders = np.array([sum(a) for a in alphas])
    results = {}
    if method in ("auto", "grid"):
        infl = (sur.inner_radius / sur.R) ** orders.astype(float)
        results["grid"] = _count(infl, budget)
    if method in ("auto", "reduced"):
        W = _monomial_matrix(X.local(), alphas) * sur.R ** (-orders.astype(float))
        U, S, Vh = np.linalg.svd(W, full_matrices=False)
        beta = S * np.abs(Vh).sum(axis=1)
        u = np.abs(U).max(axis=0)
        # guard the floating SVD with a relative margin
        results["reduced"] = _count(beta * u * (1 + 1e-9), budget)
    if not results:
        raise ValueError(f"unknown method {method!r}")
    name = min(results, key=lambda m: results[m][1])
    count, h, kept = results[name]
    return EntropyReport(eps, count, 1, math.log(count), 0.0, name,
                         {"k": sur.k, "kept": kept, "L": sur.L,
                          "alternatives": {m: v[1] for m, v in results.items()}})


def _random_poly(rng: np.random.Generator, n: int, k: int, R: float) -> Poly:
    d = int(rng.integers(0, k + 1))
    terms = {}
    for a in multi_indices(n, d):
        b = cauchy_coeff_bound(R, a)
        terms[tuple(a)] = complex(rng.uniform(-b, b), rng.uniform(-b, b))
    return Poly(n, terms, integer=False)


def entropy_lower(X: PointCloud, eps: float, samples: int = 200, seed: int = 0,
                  grid: int = 32, degree: int | None = None) -> EntropyReport:
    """Packing lower bound from random members of ``A_X^D``.

    Each sample is a random polynomial in ``z - a`` divided by a certified
    upper bound of its sup over ``D``, so it belongs to ``A_X^D``.  The
    greedy packing of the traces at ``eps`` bounds ``H_{eps/2}`` from below,
    and the report is filed at ``eps/2`` accordingly.  ``degree`` defaults
    to the surrogate degree at ``eps`` (at least 1).
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if not eps > 0:
        raise ValueError("eps must be positive")
    n = X.ambient_dim
    if degree is None:
        k = build_surrogate(X, min(eps, 0.5)).k if X.inner_radius > 0 else 0
        k = max(k, 1)
    else:
        k = int(degree)
    rng = np.random.default_rng(seed)
    disk = Polydisk((0,) * n, X.R)
    local = X.local()
    traces = np.empty((samples, len(X)), dtype=complex)
    for s in range(samples):
        P = _random_poly(rng, n, k, X.R)
        _, hi = sup_on_polydisk(P, disk, grid=max(grid, 4 * k))
        traces[s] = P.evaluate_many(local) / hi if hi > 0 else 0
    space = FiniteMetricSpace.from_array(traces)
    count = len(_pack_indices(space, eps))
    return EntropyReport(eps / 2, None, count, math.inf, math.log(count), "sampled",
                         {"pack_eps": eps, "samples": samples, "seed": seed, "k": k})


def apply_poly_map(X: PointCloud, phi: Sequence[Poly]) -> PointCloud:
    """Image cloud ``phi(X)``; the outer radius keeps at least the ratio ``R/r'`` of ``X``."""
    if not phi:
        raise ValueError("empty map")
    for P in phi:
        if P.nvars != X.ambient_dim:
            raise ValueError(f"component has {P.nvars} variables, cloud has dimension {X.ambient_dim}")
    img = np.stack([P.evaluate_many(X.points) for P in phi], axis=1)
    out = PointCloud.from_points(img, R=1.0)
    rp = out.inner_radius
    ratio = X.R / X.inner_radius if X.inner_radius > 0 else 4.0
    R = rp * ratio if rp > 0 else X.R
    return PointCloud(img, Polydisk(out.enclosing.center, R), rp, X.label)
