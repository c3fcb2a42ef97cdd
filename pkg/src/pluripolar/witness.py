"""Maximal packings of small polydisks and a certified minimax lower bound.

``X_{r,N}`` is a maximal ``eps``-distinguishable subset of ``Delta(0, r)**n``
with ``eps = (1-r) r**N / (2N)``; every normalised polynomial of degree ``N``
is then at least ``r**N / 2`` somewhere on it.  The packing is built on a
grid fine enough that grid-maximality is maximality up to ``eps/4``.  The
oracle bounds ``min_P max_X |P|`` from below with a linear program and
certifies the bound through a dual-feasible vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .polynomials import Poly, multi_indices
from .trace_space import PointCloud


@dataclass
class WitnessSet:
    r: float
    N: int
    n: int
    eps_used: float
    points: PointCloud
    grid: int

    def __len__(self):
        return len(self.points)


def witness_eps(r: float, N: int) -> float:
    if not 0 < r < 1:
        raise ValueError("requires 0 < r < 1")
    if N < 1:
        raise ValueError("requires N >= 1")
    return (1 - r) / (2 * N) * r ** N


def required_grid(r: float, eps: float) -> int:
    """Smallest per-axis grid count with step ``2r/(grid-1) <= eps/4``."""
    return math.ceil(8 * r / eps - 1e-9) + 1


def disk_grid(r: float, grid: int, n: int = 1) -> np.ndarray:
    """Grid points of ``Delta(0, r)**n`` (closed), row-major, shape ``(P, n)``."""
    g = np.linspace(-r, r, grid)
    Z = (g[:, None] + 1j * g[None, :]).ravel()
    Z = Z[np.abs(Z) <= r * (1 + 1e-12)]
    if n == 1:
        return Z[:, None]
    mesh = np.meshgrid(*([np.arange(Z.size)] * n), indexing="ij")
    return np.stack([Z[m.ravel()] for m in mesh], axis=1)


def greedy_pack_grid(points: np.ndarray, eps: float) -> np.ndarray:
    """Greedy maximal packing in the sup-of-modulus metric, lowest index first.

    Chosen points are hashed into cells of side ``eps`` per real coordinate,
    so each candidate is compared only with the ``3**(2n)`` neighbouring cells.
    """
    pts = np.atleast_2d(points)
    n = pts.shape[1]
    coords = np.concatenate([pts.real, pts.imag], axis=1)
    cells = np.floor(coords / eps).astype(np.int64)
    offsets = np.array(np.meshgrid(*([[-1, 0, 1]] * (2 * n)), indexing="ij")).reshape(2 * n, -1).T
    table: dict = {}
    chosen = []
    for i in range(pts.shape[0]):
        c = cells[i]
        hit = False
        for off in offsets:
            for j in table.get(tuple(c + off), ()):
                if np.abs(pts[j] - pts[i]).max() <= eps:
                    hit = True
                    break
            if hit:
                break
        if not hit:
            chosen.append(i)
            table.setdefault(tuple(c), []).append(i)
    return np.asarray(chosen, dtype=int)


def build_witness(r: float, N: int, n: int = 1, grid: int | None = None,
                  max_points: int = 5_000_000) -> WitnessSet:
    """Grid-maximal ``eps``-packing of ``Delta(0, r)**n`` at ``eps = (1-r) r**N / (2N)``."""
    eps = witness_eps(r, N)
    need = required_grid(r, eps)
    if grid is None:
        grid = need
    if grid < need:
        raise ValueError(f"grid {grid} too coarse for eps={eps:.6g}: need at least {need} points per axis")
    size = (math.pi / 4 * grid ** 2) ** n
    if size > max_points:
        raise ValueError(f"about {size:.3g} grid points exceed max_points={max_points}")
    pts = disk_grid(r, grid, n)
    idx = greedy_pack_grid(pts, eps)
    cloud = PointCloud(pts[idx], _unit(n), r, label=f"X_{{{r},{N}}}")
    return WitnessSet(r, N, n, eps, cloud, grid)


def _unit(n: int):
    from .polynomials import Polydisk
    return Polydisk((0,) * n, 1.0)


def build_union_witness(kmax: int, n: int = 1, max_points: int = 5_000_000) -> PointCloud:
    """``X_{1/2,2} u ... u X_{1/kmax,kmax}`` without duplicate points."""
    if kmax < 2:
        raise ValueError("requires kmax >= 2")
    parts = [build_witness(1 / k, k, n, max_points=max_points).points.points for k in range(2, kmax + 1)]
    pts = np.concatenate(parts)
    _, first = np.unique(np.round(pts, 14), axis=0, return_index=True)
    pts = pts[np.sort(first)]
    rp = float(np.abs(pts).max())
    return PointCloud(pts, _unit(n), rp, label=f"union_k<={kmax}")


def _monomials(points: np.ndarray, alphas) -> np.ndarray:
    pts = np.atleast_2d(points)
    cols = []
    for a in alphas:
        v = np.ones(pts.shape[0], dtype=complex)
        for j, e in enumerate(a):
            if e:
                v = v * pts[:, j] ** e
        cols.append(v)
    return np.stack(cols, axis=1)


def _cut_rows(V: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Rows ``Re(exp(-i theta) P(x)) - t <= 0`` in the variables ``(Re c, Im c, t)``."""
    W = (V[:, None, :] * np.exp(-1j * angles)[None, :, None]).reshape(-1, V.shape[1])
    return np.concatenate([W.real, -W.imag, -np.ones((W.shape[0], 1))], axis=1)


def _certified_value(res, c, A, b, bounds) -> float:
    """Weak-duality lower bound from the solver's inequality multipliers."""
    y = np.maximum(-np.asarray(res.ineqlin.marginals), 0.0)
    red = c + A.T @ y
    lo = np.array([bd[0] for bd in bounds], float)
    hi = np.array([bd[1] for bd in bounds], float)
    terms = np.minimum(red * lo, red * hi)
    parts = list(terms) + list(-y * b)
    val = math.fsum(parts)
    # floating error of the dot products, bounded generously
    scale = math.fsum(abs(p) for p in parts) + float(np.abs(A.T).dot(y).sum())
    return val - 1e-12 * max(scale, 1.0)


def cheb_lower_oracle(X: PointCloud, N: int, unit_disk_grid: int = 64, cuts: int = 16,
                      active: int = 256, max_rounds: int = 30, return_details: bool = False):
    """Certified lower bound on ``min max_X |P|`` over degree-``N`` polynomials with ``sup |P| >= 1``
    on the unit polydisk.

    After scaling to ``sup = 1`` and rotating the phase, some torus sample
    ``zeta`` within ``pi/M`` per angle of the maximiser has
    ``Re P(zeta) >= 1 - (N pi / M)**2 / 2`` (second-order Bernstein bound),
    and every coefficient lies in ``[-1, 1]**2``.  For each torus sample a
    linear program minimises ``t`` subject to these constraints and the
    half-plane cuts ``Re(exp(-i theta_l) P(x)) <= t``; the minimum over
    samples of the dual-certified LP values is returned.  Cuts are added
    for all points of ``X`` by constraint generation; stopping early still
    leaves a valid (weaker) bound.
    """
    pts = X.points
    n = pts.shape[1]
    alphas = multi_indices(n, N)
    m = len(alphas)
    if 2 * m > 10_000:
        raise ValueError("coefficient space too large for the LP oracle")
    M = unit_disk_grid
    c_norm = 1 - 0.5 * (N * math.pi / M) ** 2
    if c_norm <= 0:
        raise ValueError(f"unit_disk_grid={M} too coarse for degree {N}")
    V = _monomials(pts, alphas)
    angles = 2 * np.pi * np.arange(cuts) / cuts
    t_max = math.sqrt(2) * float(np.abs(V).max(axis=0).sum()) + 1.0
    bounds = [(-1.0, 1.0)] * (2 * m) + [(0.0, t_max)]
    cost = np.zeros(2 * m + 1)
    cost[-1] = 1.0
    torus = _torus(n, M)
    Vt = _monomials(torus, alphas)
    absV = np.abs(V)
    order = np.argsort(-absV.sum(axis=1), kind="stable")
    start = np.unique(np.concatenate([order[:active // 2],
                                      np.linspace(0, len(pts) - 1, min(len(pts), active // 2)).astype(int)]))
    per_sample, converged_all = [], True
    for j in range(Vt.shape[0]):
        norm_row = np.concatenate([-Vt[j].real, Vt[j].imag, [0.0]])[None, :]
        act = np.zeros(len(pts), dtype=bool)
        act[start] = True
        converged = False
        for _ in range(max_rounds):
            A = np.concatenate([_cut_rows(V[act], angles), norm_row])
            b = np.concatenate([np.zeros(act.sum() * cuts), [-c_norm]])
            res = linprog(cost, A_ub=A, b_ub=b, bounds=bounds, method="highs")
            if res.status != 0:
                raise RuntimeError(f"LP failed at torus sample {j}: {res.message}")
            coef = res.x[:m] + 1j * res.x[m:2 * m]
            vals = V @ coef
            proj = (vals[:, None] * np.exp(-1j * angles)[None, :]).real.max(axis=1)
            bad = (~act) & (proj > res.x[-1] + 1e-9)
            if not bad.any():
                converged = True
                break
            worst = np.argsort(-np.where(bad, proj, -np.inf))[:max(active, 1)]
            act[worst[bad[worst]]] = True
        converged_all &= converged
        per_sample.append(_certified_value(res, cost, A, b, bounds))
    value = max(0.0, min(per_sample))
    if return_details:
        return value, {"per_sample": per_sample, "converged": converged_all, "c_norm": c_norm,
                       "cut_factor": 1 / math.cos(math.pi / cuts)}
    return value


def _torus(n: int, M: int) -> np.ndarray:
    ring = np.exp(2j * np.pi * np.arange(M) / M)
    mesh = np.meshgrid(*([ring] * n), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def sampled_sup(P: Poly, X: PointCloud) -> float:
    return float(np.abs(P.evaluate_many(X.points)).max())
