import math

import mpmath
import numpy as np
import pytest

from conftest import curve_points
from pluripolar.gevrey import PreconditionError
from pluripolar.polynomials import Poly, Polydisk
from pluripolar.smallpoly import (PrecisionError, SearchConfig, SearchNotFound, SmallPolyCertificate,
                                  certify_pluripolarity_evidence, minimal_success_N, pigeonhole_params,
                                  search_small_poly, verify_certificate, verify_report)
from pluripolar.trace_space import PointCloud

z = Poly.variable(0, 1)
HALF = PointCloud.from_points([[0.5 + 0j]], R=2.0, center=[0j])


def cert_of(P, N=10, h=2.0):
    return SmallPolyCertificate(P, N, h, P.coeff_max() if P.terms else 0, mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0))


def test_pigeonhole_params():
    par = pigeonhole_params(2, 1.1, 1, 2)
    assert par.T == math.floor(math.exp(2 ** 1.1)) == 8
    assert par.M == 512 and math.isclose(par.log_M, 3 * math.log(8))
    eps = [pigeonhole_params(N, 1.5, 1, 2).log_eps for N in range(1, 8)]
    assert all(b < a for a, b in zip(eps, eps[1:]))
    with pytest.raises(ValueError):
        pigeonhole_params(2, 1.0, 1, 2)


def test_origin_certificate():
    X = PointCloud.from_points([[0j]], R=1.0)
    cert = search_small_poly(X, SearchConfig("exhaustive", N=1, h=1.5))
    assert cert.P == z and cert.supX == 0


def test_binomial_certificate():
    P = (2 * z - 1) ** 10
    rep = verify_report(cert_of(P), HALF)
    assert rep["ok"] and rep["supX_hi"] == 0 and rep["coeff_max"] == 15360
    assert rep["supD_lower"] >= 3 ** 10


def test_corrupted_and_constant_rejected():
    P = (2 * z - 1) ** 10
    bad = P + Poly.monomial((3,), 1)
    rep = verify_report(cert_of(bad), HALF)
    assert not rep["ok"] and "sup on X not below exp(-N^h)" in rep["reasons"]
    rep = verify_report(cert_of(Poly.constant(3)), HALF)
    assert "non-constant polynomial required" in rep["reasons"]


def test_degree_and_coefficient_checks():
    rep = verify_report(cert_of((2 * z - 1) ** 10, N=9), HALF)
    assert any("degree" in r for r in rep["reasons"])
    big = Poly(1, {(1,): 10 ** 30, (0,): -(10 ** 30) // 2}, integer=True)
    rep = verify_report(cert_of(big, N=3, h=1.5), HALF)
    assert "coefficient bound exp(N^h) exceeded" in rep["reasons"]


def test_precision_guard():
    with pytest.raises(PrecisionError):
        verify_certificate(cert_of((2 * z - 1) ** 10), HALF, precision_bits=64)
    with pytest.raises(PrecisionError):
        search_small_poly(HALF, SearchConfig("exhaustive", N=4, h=2.0, precision_bits=16))


def test_pigeonhole_search():
    cert = search_small_poly(HALF, SearchConfig("pigeonhole_meet", N=4, h=1.1, budget=20000))
    assert verify_certificate(cert, HALF)
    assert cert.P.degree <= 4 and not cert.P.is_constant


def test_not_found_diagnosis():
    X = PointCloud.from_points([[0.3 + 0.1j]], R=1.0, center=[0j])
    with pytest.raises(SearchNotFound) as info:
        search_small_poly(X, SearchConfig("exhaustive", N=2, h=2.0))
    assert info.value.diagnosis["candidates"] == 27
    assert minimal_success_N(X, SearchConfig("exhaustive", N=2, h=2.0), [2]) is None


def test_lattice_on_curve():
    X = PointCloud.from_points(curve_points(), R=1.0)
    cert = search_small_poly(X, SearchConfig("lattice_reduce", N=4, h=1.5))
    assert cert.a > 4 ** 1.5 and math.log(cert.coeff_max) <= 4 ** 1.5
    assert verify_certificate(cert, X, Polydisk([0, 0], 1.0), cert.extra["bits"])


def test_evidence():
    fam = [(k, (2 * z - 1) ** k, float(k * k)) for k in range(2, 9)]
    yes = certify_pluripolarity_evidence(fam, HALF)
    assert yes.evidence == "yes" and yes.last_over_first == 4
    no = certify_pluripolarity_evidence([(k, P, 2.0 * k) for k, P, _ in fam], HALF)
    assert no.evidence == "no" and not no.increasing
    with pytest.raises(ValueError):
        certify_pluripolarity_evidence([], HALF)
    with pytest.raises(PreconditionError):
        certify_pluripolarity_evidence([(1, Poly(1, {(1,): 1, (0,): 0}) * 0 + Poly.constant(0), 1.0)], HALF)
