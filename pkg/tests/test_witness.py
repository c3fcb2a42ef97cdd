import math

import numpy as np
import pytest

from pluripolar.polynomials import Poly
from pluripolar.trace_space import PointCloud
from pluripolar.witness import (build_union_witness, build_witness, cheb_lower_oracle, disk_grid,
                                greedy_pack_grid, required_grid, sampled_sup, witness_eps)


def test_eps_formula():
    assert witness_eps(0.5, 1) == 1 / 8
    assert witness_eps(0.5, 3) < witness_eps(0.5, 2) < witness_eps(0.5, 1)
    with pytest.raises(ValueError):
        witness_eps(0.5, 0)
    with pytest.raises(ValueError):
        witness_eps(1.0, 2)


def test_witness_packing():
    W = build_witness(0.5, 1)
    pts = W.points.points[:, 0]
    # distance in C^n is the largest coordinate modulus
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    assert d.min() > W.eps_used
    assert np.abs(pts).max() <= 0.5 + 1e-12
    # area heuristic: between (r/eps)^2 disks-per-square packing bounds
    area = math.pi * 0.25
    assert area / (2 * W.eps_used) ** 2 <= len(W) <= area / (W.eps_used / 2) ** 2 + 50
    grid = disk_grid(0.5, W.grid)
    chosen = grid[greedy_pack_grid(grid, W.eps_used)]
    assert np.array_equal(chosen, W.points.points)


def test_grid_too_coarse():
    with pytest.raises(ValueError, match="too coarse"):
        build_witness(0.5, 2, grid=10)
    assert required_grid(0.5, 1 / 8) == 33


def test_union_witness():
    one = build_witness(0.5, 2).points.points
    u2 = build_union_witness(2)
    assert np.array_equal(np.sort_complex(u2.points[:, 0]), np.sort_complex(one[:, 0]))
    u3 = build_union_witness(3).points
    s2 = {complex(round(v.real, 12), round(v.imag, 12)) for v in u2.points[:, 0]}
    s3 = {complex(round(v.real, 12), round(v.imag, 12)) for v in u3[:, 0]}
    assert s2 <= s3


def test_union_witness_lower_bound_on_monomials():
    U = build_union_witness(3)
    for N in (1, 2, 3):
        for P in (Poly.variable(0, 1) ** N, Poly.variable(0, 1) ** N - Poly.constant(0.5 ** N)):
            assert sampled_sup(P, U) >= 0.5 * N ** -N - 1e-12


def test_oracle_constants():
    W = build_witness(0.5, 1)
    assert abs(cheb_lower_oracle(W.points, 0) - 1) < 1e-6


def test_oracle_bounds():
    W = build_witness(0.5, 1)
    v = cheb_lower_oracle(W.points, 1)
    assert v >= 0.25 - 1e-6
    # z itself is normalised and attains max |z| over the witness
    assert v <= sampled_sup(Poly.variable(0, 1), W.points) + 1e-9


def test_oracle_dense_disk_near_chebyshev():
    g = np.linspace(-0.5, 0.5, 41)
    Z = (g[:, None] + 1j * g[None, :]).ravel()
    X = PointCloud.from_points(Z[np.abs(Z) <= 0.5][:, None], R=1.0, center=[0j])
    v = cheb_lower_oracle(X, 2)
    assert 0.25 / math.cos(math.pi / 16) ** 2 * 0.9 <= v / 1.0 <= 0.25 + 1e-6


def test_oracle_monotone():
    W = build_witness(0.5, 1)
    sub = W.points.subset(np.arange(0, len(W), 2))
    assert cheb_lower_oracle(sub, 1) <= cheb_lower_oracle(W.points, 1) + 1e-6
