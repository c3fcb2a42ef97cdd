"""Acceptance criteria 1-12 at their stated tolerances and time limits.

Each test prints one ``criterion N: PASS/FAIL`` line (run with ``-s`` to see
them inline); the conftest summary repeats the verdicts at the end.
"""
import math
import time

import numpy as np
import pytest

from conftest import curve_points, disk_points
from pluripolar.gevrey import check_power_bound, make_gevrey_family, validate_family
from pluripolar.kdim import (EpsSchedule, estimate_psi, property_harness, section5_bound,
                             section5_N_for_eps)
from pluripolar.metric_entropy import (FiniteMetricSpace, greedy_cover_sets, greedy_pack,
                                       linf_ball_entropy_bound, linf_ball_grid_cover)
from pluripolar.polynomials import Poly, Polydisk, bernstein_extend, sup_on_polydisk, taylor_truncation_bound
from pluripolar.smallpoly import (SearchConfig, SearchNotFound, certify_pluripolarity_evidence,
                                  search_small_poly, verify_report)
from pluripolar.trace_space import PointCloud
from pluripolar.witness import build_witness, cheb_lower_oracle


def report(k, ok, detail=""):
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    return ok


# 1 ------------------------------------------------------------------------

def test_criterion_01_sandwich():
    rng = np.random.default_rng(20240101)
    t0 = time.time()
    violations, checked = [], 0
    for trial in range(200):
        npts = int(rng.integers(1, 201))
        dim = int(rng.integers(1, 4))
        X = rng.uniform(-1, 1, size=(npts, dim)) * rng.uniform(0.1, 3.0)
        space = FiniteMetricSpace.from_array(X, "sup")
        D = space.matrix()
        dmax = float(D.max()) if npts > 1 else 1.0
        for eps in dmax * np.array([0.02, 0.07, 0.15, 0.3, 0.6]):
            pack2 = len(greedy_pack(space, 2 * eps))
            cover = len(greedy_cover_sets(space, eps))
            pack1 = len(greedy_pack(space, eps))
            checked += 1
            if not pack2 <= cover <= pack1:
                violations.append((trial, eps, pack2, cover, pack1))
    dt = time.time() - t0
    ok = not violations and checked == 1000 and dt <= 10
    assert report(1, ok, f"violations={len(violations)} checks={checked} time={dt:.1f}s")


# 2 ------------------------------------------------------------------------

def test_criterion_02_linf_ball():
    t0 = time.time()
    bad = []
    for n in (1, 2, 3):
        for r in (0.5, 1.0, 2.0):
            for eps in (0.9, 0.3, 0.1, 0.03, 0.011, 0.001):
                count, centres = linf_ball_grid_cover(n, r, eps)
                # cells of the axis cover have diameter <= 2 eps and cover [-r, r]
                half = (centres[1] - centres[0]) / 2 if len(centres) > 1 else r
                covers = centres[0] - half <= -r + 1e-12 and centres[-1] + half >= r - 1e-12
                if not (math.log(count) <= linf_ball_entropy_bound(n, r, eps) and half <= eps + 1e-15 and covers):
                    bad.append((n, r, eps, count))
    dt = time.time() - t0
    assert report(2, not bad and dt <= 5, f"failures={bad} time={dt:.2f}s")


# 3 ------------------------------------------------------------------------

def test_criterion_03_bernstein_walsh():
    rng = np.random.default_rng(3)
    t0 = time.time()
    worst, bad = 0.0, 0
    for _ in range(100):
        n = int(rng.integers(1, 3))
        deg = int(rng.integers(0, 9))
        terms = {}
        for alpha in np.ndindex(*([deg + 1] * n)):
            if sum(alpha) <= deg and rng.random() < 0.6:
                terms[alpha] = complex(rng.normal(), rng.normal())
        P = Poly(n, terms or {(0,) * n: 1.0})
        small, big = Polydisk((0,) * n, 1.0), Polydisk((0,) * n, 2.0)
        _, A = sup_on_polydisk(P, small, grid=64)
        dense, _ = sup_on_polydisk(P, big, grid=96 if n == 1 else 48)
        bound = bernstein_extend(P, small, big, A)
        worst = max(worst, dense / bound)
        if dense > bound * (1 + 1e-6):
            bad += 1
    dt = time.time() - t0
    assert report(3, bad == 0 and dt <= 30, f"violations={bad} max(sup/bound)={worst:.4f} time={dt:.1f}s")


# 4 ------------------------------------------------------------------------

def test_criterion_04_truncation_decay():
    """Error of the degree-k Taylor polynomial of 1/(2-z) on the closed disk of radius 0.75."""
    t0 = time.time()
    r, R = 0.75, 1.5
    zs = r * np.exp(2j * np.pi * np.arange(256) / 256)
    f = 1 / (2 - zs)
    errs, bounds = [], []
    for k in range(10, 21):
        Tk = sum(zs ** j / 2 ** (j + 1) for j in range(k + 1))
        errs.append(float(np.abs(f - Tk).max()))
        bounds.append(taylor_truncation_bound(R, r, k, supf=1 / (2 - R)))
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    within_bound = all(e <= b for e, b in zip(errs, bounds))
    dt = time.time() - t0
    ok = within_bound and all(abs(q - 0.5) <= 0.05 for q in ratios) and dt <= 5
    assert report(4, ok, f"ratios={min(ratios):.4f}..{max(ratios):.4f} (target 0.5+-0.05) "
                         f"errors<=bound={within_bound} time={dt:.2f}s")


# 5 ------------------------------------------------------------------------

def test_criterion_05_power_bound():
    t0 = time.time()
    f = make_gevrey_family(1, "analytic_rational", {"num": [1], "den": [1, 0, 1]}, box=[[-1, 1]])
    assert f.exact
    reports = [check_power_bound(f, k, 10) for k in range(1, 6)]
    viol = sum(len(r.violations) for r in reports)
    undecided = sum(r.undecided for r in reports)
    dt = time.time() - t0
    ok = viol == 0 and undecided == 0 and dt <= 60
    assert report(5, ok, f"violations={viol} checks={sum(r.checked for r in reports)} "
                         f"C={reports[0].C:.4g} time={dt:.1f}s")


# 6 ------------------------------------------------------------------------

SCHEDULE = EpsSchedule.logspaced(1e-2, 1e-5, 10)


def test_criterion_06_disk_and_singleton(disk_cloud, singleton_cloud):
    t0 = time.time()
    psi_disk = estimate_psi(disk_cloud, SCHEDULE, lower=False).psi_upper
    psi_point = estimate_psi(singleton_cloud, SCHEDULE, lower=False).psi_upper
    dt = time.time() - t0
    ok = abs(psi_disk - 1.0) <= 0.3 and abs(psi_point) <= 0.2 and dt <= 600
    assert report(6, ok, f"psi(disk)={psi_disk:.3f} psi(point)={psi_point:.3f} time={dt:.1f}s")


# 7 ------------------------------------------------------------------------

def test_criterion_07_gevrey_curve(curve_cloud):
    t0 = time.time()
    est = estimate_psi(curve_cloud, SCHEDULE, lower=False)
    f = make_gevrey_family(1, "exponential", {"A": 1, "lam": 1}, box=[[0, 0.25]])
    assert validate_family(f)["accepted"]
    t, s = 1.5, 1.0
    rows = []
    for r in est.reports:
        N = section5_N_for_eps(r.eps, t, s)
        rows.append((r.eps, r.h_upper, section5_bound(N, 1, t, s, f.C)["H"]))
    under = all(h <= H for _, h, H in rows)
    psi = est.psi_upper
    dt = time.time() - t0
    ok = psi <= 1.4 and 2.0 - psi >= 0.4 and under and dt <= 900
    assert report(7, ok, f"psi={psi:.3f} h_upper<=bound at all {len(rows)} points={under} time={dt:.1f}s")


# 8 and 10 -----------------------------------------------------------------

KS = list(range(4, 17))


@pytest.fixture(scope="module")
def lattice_certificates(curve_cloud):
    t0 = time.time()
    certs = {}
    for k in KS:
        try:
            certs[k] = search_small_poly(curve_cloud, SearchConfig("lattice_reduce", N=k, h=1.5, precision_bits=256))
        except SearchNotFound:
            certs[k] = None
    return certs, time.time() - t0


@pytest.mark.slow
def test_criterion_08_small_polynomial(curve_cloud, lattice_certificates):
    certs, dt = lattice_certificates
    good = []
    for k, c in certs.items():
        if c is None:
            continue
        rep = verify_report(c, curve_cloud, precision_bits=max(128, c.extra["bits"]))
        if (rep["ok"] and rep["bits"] >= 128 and rep["supX_hi"] < rep["target_lo"]
                and math.log(rep["coeff_max"]) <= k ** 1.5):
            good.append(k)
    ok = bool(good) and min(good) <= 16 and dt <= 1800
    assert report(8, ok, f"verified degrees={good} search time={dt:.0f}s")


@pytest.mark.slow
def test_criterion_10_evidence(curve_cloud, lattice_certificates):
    certs, _ = lattice_certificates
    family = [(k, certs[k].P, certs[k].a) for k in KS if certs[k] is not None]
    t0 = time.time()
    verdict = certify_pluripolarity_evidence(family, curve_cloud)
    control = certify_pluripolarity_evidence([(k, P, 2.0 * k) for k, P, _ in family], curve_cloud)
    dt = time.time() - t0
    ratios = ", ".join(f"{q:.2f}" for q in verdict.ratios)
    ok = (len(family) == len(KS) and verdict.evidence == "yes" and control.evidence == "no" and dt <= 5)
    assert report(10, ok, f"a_k/k=[{ratios}] last/first={verdict.last_over_first:.2f} "
                          f"increasing={verdict.increasing} verdict={verdict.evidence} "
                          f"control={control.evidence} time={dt:.1f}s")


# 9 ------------------------------------------------------------------------

def test_criterion_09_witness():
    t0 = time.time()
    rows = []
    for N in (1, 2, 3):
        W = build_witness(0.5, N)
        rows.append((N, cheb_lower_oracle(W.points, N), 0.5 * 0.5 ** N))
    dt = time.time() - t0
    ok = all(v >= tgt - 1e-6 for _, v, tgt in rows) and dt <= 600
    detail = " ".join(f"N={N}:{v:.4f}>={tgt:.4f}" for N, v, tgt in rows)
    assert report(9, ok, f"{detail} time={dt:.1f}s")


# 11 -----------------------------------------------------------------------

def test_criterion_11_property_harness(disk_cloud, curve_cloud):
    t0 = time.time()
    point = PointCloud.from_points([[0.1 + 0.05j]], R=1.0, center=[0j])
    second = PointCloud.from_points(curve_points(200, 0.25, 0.5), R=1.0)
    res_disk = property_harness(disk_cloud, point, SCHEDULE)
    res_curve = property_harness(curve_cloud, second, SCHEDULE)
    dt = time.time() - t0
    ok = res_disk["pass"] and res_curve["pass"] and dt <= 1200
    gaps = {name: {k: round(r[k]["gap"], 3) for k in ("subset_monotone", "union_max", "image_bound")}
            for name, r in (("disk", res_disk), ("curve", res_curve))}
    assert report(11, ok, f"gaps={gaps} time={dt:.1f}s")


# 12 -----------------------------------------------------------------------

def test_criterion_12_domain_independence():
    t0 = time.time()
    pts = disk_points()
    p1 = estimate_psi(PointCloud.from_points(pts, R=1.0, center=[0j]), SCHEDULE, lower=False).psi_upper
    p2 = estimate_psi(PointCloud.from_points(pts, R=2.0, center=[0j]), SCHEDULE, lower=False).psi_upper
    dt = time.time() - t0
    assert report(12, abs(p1 - p2) <= 0.2 and dt <= 600, f"psi(R=1)={p1:.3f} psi(R=2)={p2:.3f} time={dt:.1f}s")
