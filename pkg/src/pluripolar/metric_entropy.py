"""Covering and packing numbers of finite metric spaces.

Covers here follow the diameter convention: an eps-covering is a family of
sets of diameter at most ``2*eps``.  Greedy routines give a certified upper
bound on the minimal covering number ``N_eps`` and a certified lower bound on
the maximal packing number ``M_eps``; exact values are never claimed.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

TOL = 1e-12

METHODS = ("greedy", "grid", "product", "union", "reduced", "sampled")


class FiniteMetricSpace:
    """Ordered finite point set with a distance oracle.

    Array-backed spaces (see :meth:`from_array`) compute distance rows on
    demand with numpy; oracle-backed spaces build the full matrix once.
    """

    _MATRIX_LIMIT = 3000

    def __init__(self, points: Sequence[Any], dist: Callable[[Any, Any], float], label: str = ""):
        self.points = list(points)
        self.dist = dist
        self.label = label
        self._matrix: np.ndarray | None = None
        self._array: np.ndarray | None = None
        self._metric = "sup"

    @classmethod
    def from_array(cls, X, metric: str = "sup", label: str = "") -> "FiniteMetricSpace":
        """Rows of ``X`` as points.  Complex rows use the modulus per coordinate."""
        X = np.asarray(X)
        if X.ndim == 1:
            X = X[:, None]
        if metric not in ("sup", "euclidean"):
            raise ValueError(f"unsupported metric {metric!r}")
        if not np.iscomplexobj(X):
            X = X.astype(float)

        def dist(a, b):
            d = np.abs(np.asarray(a) - np.asarray(b))
            return float(d.max() if metric == "sup" else np.sqrt((d ** 2).sum()))

        space = cls(list(X), dist, label)
        space._array = X
        space._metric = metric
        if len(X) <= cls._MATRIX_LIMIT:
            space._matrix = _pairwise(X, X, metric)
        return space

    def __len__(self):
        return len(self.points)

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            if self._array is not None:
                self._matrix = _pairwise(self._array, self._array, self._metric)
                return self._matrix
            n = len(self.points)
            D = np.zeros((n, n))
            for i in range(n):
                for j in range(i + 1, n):
                    D[i, j] = D[j, i] = self.dist(self.points[i], self.points[j])
            self._matrix = D
        return self._matrix

    def row(self, i: int, idx: np.ndarray | None = None) -> np.ndarray:
        """Distances from point ``i`` to points ``idx`` (all points by default)."""
        if self._matrix is None and self._array is not None:
            target = self._array if idx is None else self._array[idx]
            return _pairwise(self._array[i:i + 1], target, self._metric)[0]
        D = self.matrix()
        return D[i] if idx is None else D[i, idx]

    def check_axioms(self, triples: int = 200, seed: int = 0) -> bool:
        """Symmetry, zero diagonal, no duplicates and spot-checked triangle inequality."""
        n = len(self)
        if n == 0:
            return False
        rng = np.random.default_rng(seed)
        for i in rng.integers(0, n, size=min(n, 20)):
            r = self.row(int(i))
            if r[i] != 0 or np.any(r < 0) or np.sum(r <= 0) > 1:
                return False
        idx = rng.integers(0, n, size=(triples, 3))
        for i, j, k in idx:
            dij = self.dist(self.points[i], self.points[j])
            if abs(dij - self.dist(self.points[j], self.points[i])) > TOL:
                return False
            if self.dist(self.points[i], self.points[k]) > dij + self.dist(self.points[j], self.points[k]) + TOL:
                return False
        return True


def _pairwise(A: np.ndarray, B: np.ndarray, metric: str) -> np.ndarray:
    if np.iscomplexobj(A) or np.iscomplexobj(B):
        out = np.empty((A.shape[0], B.shape[0]))
        step = max(1, 4_000_000 // max(1, B.shape[0] * A.shape[1]))
        for i in range(0, A.shape[0], step):
            diff = np.abs(A[i:i + step, None, :] - B[None, :, :])
            out[i:i + step] = diff.max(axis=2) if metric == "sup" else np.sqrt((diff ** 2).sum(axis=2))
        return out
    return cdist(A, B, "chebyshev" if metric == "sup" else "euclidean")


def _require_points(space: FiniteMetricSpace, eps: float):
    if len(space) == 0:
        raise ValueError("empty metric space")
    if not eps > 0:
        raise ValueError("eps must be positive")


@dataclass
class EntropyReport:
    """Two-sided bounds on ``H_eps`` (natural logarithms).

    ``h_upper = log(cover_count)``; ``h_lower`` comes from a packing count
    through ``M_{2eps} <= N_eps``.  A report with no upper information has
    ``cover_count=None`` and ``h_upper=inf``.
    """

    eps: float
    cover_count: int | None
    pack_count: int
    h_upper: float
    h_lower: float
    method: str
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.h_lower > self.h_upper + 1e-9:
            raise ValueError(f"h_lower={self.h_lower} exceeds h_upper={self.h_upper}")

    @classmethod
    def from_counts(cls, eps: float, cover_count: int | None, pack_count: int, method: str,
                    **extra) -> "EntropyReport":
        h_up = math.log(cover_count) if cover_count is not None else math.inf
        return cls(eps, cover_count, pack_count, h_up, math.log(pack_count), method, dict(extra))

    def to_json(self) -> dict:
        d = asdict(self)
        if self.cover_count is not None:
            d["cover_count"] = str(self.cover_count)
        if math.isinf(self.h_upper):
            d["h_upper"] = None
        return d

    def csv_row(self) -> tuple:
        return (self.eps, self.h_lower, self.h_upper, self.method)


def reports_to_csv(reports: Sequence[EntropyReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "h_lower", "h_upper", "method"])
    for r in reports:
        w.writerow([f"{r.eps:.17g}", f"{r.h_lower:.17g}", f"{r.h_upper:.17g}", r.method])
    return buf.getvalue()


def greedy_pack(space: FiniteMetricSpace, eps: float) -> list:
    """Inclusion-maximal eps-distinguishable subset, lowest index first.

    Selected points are pairwise more than ``eps`` apart; every other point is
    within ``eps`` of a selected one, so the selection is also the set of
    centres of an eps-cover by balls.
    """
    return [space.points[i] for i in _pack_indices(space, eps)]


def _pack_indices(space: FiniteMetricSpace, eps: float) -> list[int]:
    _require_points(space, eps)
    n = len(space)
    blocked = np.zeros(n, dtype=bool)
    chosen = []
    i = 0
    while i < n:
        chosen.append(i)
        blocked |= space.row(i) <= eps + TOL
        free = np.flatnonzero(~blocked[i + 1:])
        if free.size == 0:
            break
        i = i + 1 + int(free[0])
    return chosen


def greedy_cover_sets(space: FiniteMetricSpace, eps: float) -> list[list[int]]:
    """An eps-covering as index sets of diameter ``<= 2*eps``.

    Two greedy constructions are tried and the smaller kept: balls of radius
    ``eps`` around a maximal packing, and complete-linkage growth of each set
    from the lowest uncovered index.
    """
    _require_points(space, eps)
    n = len(space)
    centres = _pack_indices(space, eps)
    owner = np.full(n, -1)
    for c_pos, c in enumerate(centres):
        hit = (space.row(c) <= eps + TOL) & (owner < 0)
        owner[hit] = c_pos
    ball_sets = [np.flatnonzero(owner == k).tolist() for k in range(len(centres))]

    covered = np.zeros(n, dtype=bool)
    linkage_sets = []
    for i in range(n):
        if covered[i]:
            continue
        covered[i] = True
        members = [i]
        # only points within 2 eps of the seed can ever join; reach only grows
        cand = np.flatnonzero((space.row(i) <= 2 * eps + TOL) & ~covered)
        cand = cand[cand > i]
        reach = space.row(i, cand)
        alive = np.ones(cand.size, dtype=bool)
        pos = 0
        while True:
            ok = np.flatnonzero(alive[pos:] & (reach[pos:] <= 2 * eps + TOL))
            if ok.size == 0:
                break
            pos += int(ok[0])
            j = int(cand[pos])
            members.append(j)
            covered[j] = True
            alive[pos] = False
            np.maximum(reach, space.row(j, cand), out=reach)
            pos += 1
        linkage_sets.append(members)
        if len(linkage_sets) >= len(ball_sets):
            return ball_sets
    return linkage_sets


def greedy_cover(space: FiniteMetricSpace, eps: float) -> list:
    """Representatives (first member) of the sets of :func:`greedy_cover_sets`."""
    return [space.points[s[0]] for s in greedy_cover_sets(space, eps)]


def sandwich_check(space: FiniteMetricSpace, eps: float) -> bool:
    """``pack(2 eps) <= cover(eps) <= pack(eps)`` for the greedy counts.

    A ``False`` result means an algorithmic defect, not a mathematical one.
    """
    pack2 = len(_pack_indices(space, 2 * eps))
    cover = len(greedy_cover_sets(space, eps))
    pack1 = len(_pack_indices(space, eps))
    return pack2 <= cover <= pack1


def entropy_report(space: FiniteMetricSpace, eps: float) -> EntropyReport:
    cover = len(greedy_cover_sets(space, eps))
    pack = len(_pack_indices(space, 2 * eps))
    return EntropyReport.from_counts(eps, cover, pack, "greedy")


def _same_eps(reports: Sequence[EntropyReport]) -> float:
    if not reports:
        raise ValueError("no reports given")
    eps = reports[0].eps
    for r in reports[1:]:
        if not math.isclose(r.eps, eps, rel_tol=1e-12):
            raise ValueError(f"mismatched eps: {r.eps} vs {eps}")
    return eps


def product_entropy_bound(reports: Sequence[EntropyReport]) -> EntropyReport:
    """Bounds for a Cartesian product with the sup-metric.

    Products of covers cover the product, so upper counts multiply; products
    of ``2 eps``-packings are ``2 eps``-packings, so lower counts multiply too.
    """
    eps = _same_eps(reports)
    if len(reports) == 1:
        return reports[0]
    cover = None if any(r.cover_count is None for r in reports) else math.prod(r.cover_count for r in reports)
    pack = math.prod(r.pack_count for r in reports)
    rep = EntropyReport.from_counts(eps, cover, pack, "product")
    if cover is None:
        rep.h_upper = math.inf
    return rep


def union_entropy_bound(reports: Sequence[EntropyReport]) -> EntropyReport:
    """Bounds for traces on a union ``X_1 u ... u X_k``.

    The trace space embeds isometrically in the product of the parts, giving
    ``H <= sum H_j <= k max H_j``; restriction to any part gives the lower
    bound ``max`` of the parts' lower bounds.
    """
    eps = _same_eps(reports)
    if len(reports) == 1:
        return reports[0]
    cover = None if any(r.cover_count is None for r in reports) else math.prod(r.cover_count for r in reports)
    pack = max(r.pack_count for r in reports)
    k_max = len(reports) * max(r.h_upper for r in reports)
    return EntropyReport.from_counts(eps, cover, pack, "union", k_max_upper=k_max)


def linf_ball_entropy_bound(n: int, r: float, eps: float) -> float:
    """``n log(r/eps + 1)``, a strict upper bound on ``H_eps`` of the radius-``r`` sup-ball."""
    if n < 1 or not r > 0 or not eps > 0:
        raise ValueError("requires n >= 1, r > 0, eps > 0")
    return n * math.log(r / eps + 1)


def linf_ball_grid_cover(n: int, r: float, eps: float) -> tuple[int, np.ndarray]:
    """Cell count and 1-d cell centres of the product grid cover of ``[-r, r]^n``.

    Each axis is cut into ``ceil(r/eps)`` intervals of length ``<= 2*eps``.
    """
    if n < 1 or not r > 0 or not eps > 0:
        raise ValueError("requires n >= 1, r > 0, eps > 0")
    m = max(1, math.ceil(r / eps - 1e-12))
    width = 2 * r / m
    centres = -r + width * (np.arange(m) + 0.5)
    return m ** n, centres


def load_cloud_json(text: str) -> tuple[int, np.ndarray, str]:
    """Parse ``{"ambient_dim": n, "points": [[re, im, ...]], "metric": "sup"}``.

    Each point lists ``2n`` reals as interleaved (re, im) pairs.
    """
    doc = json.loads(text)
    n = int(doc["ambient_dim"])
    rows = doc["points"]
    pts = np.asarray(rows, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 * n:
        raise ValueError(f"each point needs {2 * n} reals (re, im pairs) for ambient_dim={n}")
    return n, pts[:, 0::2] + 1j * pts[:, 1::2], doc.get("metric", "sup")


def dump_cloud_json(points: np.ndarray, metric: str = "sup") -> str:
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    rows = [[float(v) for z in row for v in (z.real, z.imag)] for row in pts]
    return json.dumps({"ambient_dim": pts.shape[1], "points": rows, "metric": metric})
