import math

import numpy as np
import pytest

from conftest import curve_points, disk_points
from pluripolar.polynomials import Poly
from pluripolar.trace_space import (PointCloud, apply_poly_map, build_surrogate, entropy_lower,
                                    entropy_upper, ncells, polydisk_tail)


def test_cloud_validation():
    with pytest.raises(ValueError):
        PointCloud.from_points(np.zeros((0, 1)))
    with pytest.raises(ValueError):
        PointCloud.from_points([[0.9 + 0j]], R=0.5, center=[0j])
    X = PointCloud.from_points(disk_points(), R=1.0, center=[0j])
    assert math.isclose(X.inner_radius, 0.25) and X.R == 1.0


def test_cloud_json_roundtrip(disk_cloud):
    back = PointCloud.from_json(disk_cloud.to_json())
    assert np.array_equal(back.points, disk_cloud.points)
    assert back.R == disk_cloud.R and back.inner_radius == disk_cloud.inner_radius


def test_surrogate_degree(disk_cloud):
    # the smallest k with (4/3) 4**-k <= 1e-3/3 is 6: 4**6 = 4096 >= 4000
    sur = build_surrogate(disk_cloud, 1e-3)
    assert sur.k == 6
    assert (4 / 3) * 4.0 ** -6 <= 1e-3 / 3 < (4 / 3) * 4.0 ** -5
    k_half = build_surrogate(disk_cloud, 5e-4).k
    assert 0 <= k_half - sur.k <= math.ceil(math.log(2) / math.log(4))


def test_polydisk_tail_bounds_truncation():
    # in one variable the tail equals the geometric series exactly
    assert math.isclose(polydisk_tail(1, 0.25, 3, 1), 0.25 ** 4 / 0.75, rel_tol=1e-9)
    assert polydisk_tail(1, 0.25, 3, 2) > polydisk_tail(1, 0.25, 3, 1)


def test_singleton_upper_is_disk_entropy(singleton_cloud):
    for eps in (0.1, 0.01, 0.001):
        rep = entropy_upper(singleton_cloud, eps)
        # value disk of radius 1 at eps: between the 2-d packing count and the ball bound
        assert rep.h_upper <= 2 * math.log(1 / eps + 1) + math.log(2)
        assert rep.h_upper >= math.log(math.pi / (4 * eps * eps)) - 1


def test_large_eps_is_trivial(disk_cloud):
    rep = entropy_upper(disk_cloud, 2.5)
    assert rep.h_upper == 0 and rep.cover_count == 1


def test_upper_grows_like_log_squared(disk_cloud):
    eps = [1e-2, 1e-3, 1e-4, 1e-5]
    h = [entropy_upper(disk_cloud, e).h_upper for e in eps]
    assert all(b > a for a, b in zip(h, h[1:]))
    L = np.log(1 / np.array(eps))
    q = np.array(h) / L ** 2
    assert q.max() / q.min() < 2


def test_methods_are_both_bounds(curve_cloud):
    rep = entropy_upper(curve_cloud, 1e-3)
    alt = rep.extra["alternatives"]
    assert rep.h_upper == min(alt.values())
    assert entropy_upper(curve_cloud, 1e-3, "grid").h_upper >= rep.h_upper


def test_ncells():
    assert ncells(0.5) == 1
    assert ncells(1.0) == 1
    assert ncells(10.0) == min(math.ceil(math.sqrt(2) * 10) ** 2, math.floor(math.pi * 144 / 2))


def test_lower_singleton_and_determinism(singleton_cloud):
    rep = entropy_lower(singleton_cloud, 0.5, samples=200, seed=3)
    assert rep.pack_count >= 9 and rep.eps == 0.25
    again = entropy_lower(singleton_cloud, 0.5, samples=200, seed=3)
    assert again.to_json() == rep.to_json()


def test_lower_more_points_separate_more():
    one = PointCloud.from_points([[0.0 + 0j]], R=1.0, center=[0j])
    two = PointCloud.from_points([[0.0 + 0j], [0.5 + 0j]], R=1.0, center=[0j])
    # same sampled functions: the extra coordinate can only separate traces further
    for seed in range(5):
        assert entropy_lower(two, 0.3, 100, seed, degree=3).h_lower >= entropy_lower(one, 0.3, 100, seed, degree=3).h_lower


def test_lower_below_upper(disk_cloud):
    lo = entropy_lower(disk_cloud, 1e-2, samples=100)
    up = entropy_upper(disk_cloud, lo.eps)
    assert lo.h_lower <= up.h_upper


def test_poly_maps():
    X = PointCloud.from_points(curve_points(50), R=1.0)
    ident = apply_poly_map(X, [Poly.variable(0, 2), Poly.variable(1, 2)])
    assert np.allclose(ident.points, X.points)
    proj = apply_poly_map(X, [Poly.variable(0, 2)])
    assert proj.ambient_dim == 1
    D = PointCloud.from_points(disk_points(), R=1.0, center=[0j])
    z = Poly.variable(0, 1)
    par = apply_poly_map(D, [z, z ** 2])
    assert np.allclose(par.points[:, 1], D.points[:, 0] ** 2)
    assert np.abs(par.points).max() <= max(0.25, 0.25 ** 2) + 1e-12
    with pytest.raises(ValueError):
        apply_poly_map(X, [z])
