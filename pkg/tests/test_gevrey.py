import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pluripolar.gevrey import (GevreyGraph, Jet, PreconditionError, calibrate, calibrate_constant,
                               check_power_bound, geometric_jet, make_gevrey_family, reduce_on_graph,
                               remainder_log_estimate, sample_graph, sin_jet, split_holomorphic,
                               validate_family, zero_family)
from pluripolar.polynomials import Poly

x = Jet.variable(0, 1, 8)


def test_jet_identities():
    assert (1 + x) * (1 - x) == 1 - x * x
    g2 = geometric_jet(8) ** 2
    assert [g2.coefficient((k,)) for k in range(9)] == [k + 1 for k in range(9)]
    s = (Jet.variable(0, 1, 10) ** 2).compose(sin_jet(10))
    # sin(x**2) = x**2 - x**6/6 + x**10/120 - ...
    want = [0, 0, 1, 0, 0, 0, Fraction(-1, 6), 0, 0, 0, Fraction(1, 120)]
    assert [s.coefficient((k,)) for k in range(11)] == want


def test_reciprocal():
    d = Jet.univariate([Fraction(1), Fraction(0), Fraction(1)], order=8)
    r = d.reciprocal()
    assert d * r == Jet.constant(Fraction(1), 1, 8)
    assert [r.coefficient((k,)) for k in range(0, 9, 2)] == [1, -1, 1, -1, 1]


jets = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=7), min_size=1, max_size=5).map(
    lambda c: Jet.univariate(c, order=4))


@settings(max_examples=50, deadline=None)
@given(jets, jets, jets)
def test_jet_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a ** 3 == a * a * a


def test_calibrate_examples():
    assert calibrate_constant(make_gevrey_family(1, "analytic_rational", {"num": [1]})) == 1.0
    f = make_gevrey_family(1, "analytic_rational", {"num": [1], "den": [1, 0, 1]}, box=[[-1, 1]])
    C = calibrate_constant(f, maxorder=10)
    assert 0 < C < math.inf
    cubic = make_gevrey_family(1, "analytic_rational", {"num": [0, 1, 0, 2]}, box=[[-1, 1]])
    cal = calibrate(cubic, maxorder=8)
    assert cal.per_order[4:] == [0.0] * 5 and cal.C > 0


def test_family_validation():
    assert make_gevrey_family(1, "analytic_rational", {"num": [1], "den": [1, 0, 1]}).exact
    lac2 = make_gevrey_family(2, "lacunary_cosine", {"sigma": 2})
    assert validate_family(lac2, 12)["accepted"]
    lac1 = make_gevrey_family(1, "lacunary_cosine", {"sigma": 2})
    assert not validate_family(lac1, 12)["accepted"]
    with pytest.raises(ValueError, match="pole"):
        make_gevrey_family(1, "analytic_rational", {"num": [1], "den": [0, 1]}, box=[[-1, 1]])
    with pytest.raises(ValueError):
        make_gevrey_family(0.5, "analytic_rational")


def test_power_bound():
    one = make_gevrey_family(1, "analytic_rational", {"num": [1]})
    assert check_power_bound(one, 3, 6).ok
    f = make_gevrey_family(1, "analytic_rational", {"num": [1], "den": [1, 0, 1]}, box=[[-1, 1]])
    rep = check_power_bound(f, 2, 8)
    assert rep.ok and rep.checked == 9 * 9
    big = make_gevrey_family(1, "analytic_rational", {"num": [2]}, box=[[-1, 1]])
    with pytest.raises(PreconditionError):
        check_power_bound(big, 1, 4)


def test_exponential_family_scaled():
    e = make_gevrey_family(1, "exponential", {"A": 1, "lam": 1}, box=[[0, 0.25]])
    rep = validate_family(e)
    assert rep["accepted"] and math.isclose(e.sup_bound, math.exp(0.25), rel_tol=1e-9)
    assert math.isclose(e.C, math.exp(0.25), rel_tol=1e-6)


def curve_graph():
    box = [[0.0, 0.25]]
    return GevreyGraph(1, 2, 1.0, [zero_family(box)],
                       [make_gevrey_family(1, "exponential", {"A": 1, "lam": 1}, box)], box)


def test_sample_graph():
    G = curve_graph()
    X = sample_graph(G, 20)
    assert len(X) == 20
    assert np.allclose(X.points[:, 1], np.exp(X.points[:, 0].real))
    flat = GevreyGraph(1, 2, 1.0, [zero_family([[0, 1]])], [zero_family([[0, 1]])], [[0, 1]])
    P = sample_graph(flat, 5).points
    assert np.all(P.imag == 0) and np.all(P[:, 1] == 0)


def test_split_holomorphic():
    z = Poly.variable(0, 2, integer=False)
    Q = split_holomorphic(z * z, 1)
    # (x + i y)**2 = x**2 - y**2 + 2 i x y
    assert Q.coefficient((2, 0, 0)) == 1 and Q.coefficient((0, 2, 0)) == -1 and Q.coefficient((1, 1, 0)) == 2j


def test_reduce_examples():
    G = curve_graph()
    P = Poly(3, {(2, 0, 0): 1.0})
    Q, rem = reduce_on_graph(P, G, [0], 3)
    assert rem == 0 and Q.coefficient((2,)) == 1 and len(Q.terms) == 1
    flat = GevreyGraph(1, 2, 1.0, [zero_family([[0, 1]])], [zero_family([[0, 1]])], [[0, 1]])
    Q, _ = reduce_on_graph(Poly(3, {(0, 1, 0): 1.0}), flat, [0], 4, C=1.0)
    assert all(abs(c) == 0 for c in Q.terms.values())


def test_reduce_w_gives_taylor_polynomial():
    G = curve_graph()
    validate_family(G.H[0])
    N, delta = 6, 0.1
    Q, rem = reduce_on_graph(Poly(3, {(0, 0, 1): 1.0}, integer=False), G, [0], N, delta=delta, C=G.H[0].C_power)
    for k in range(N + 1):
        assert math.isclose(Q.coefficient((k,)).real, 1 / math.factorial(k), rel_tol=1e-12)
    tail = math.exp(delta) - sum(delta ** k / math.factorial(k) for k in range(N + 1))
    assert tail <= rem


def test_remainder_log_estimate():
    assert remainder_log_estimate(1, 2, 20, 0) == -math.inf
    with pytest.raises(ValueError):
        remainder_log_estimate(1, 1, 20, 1)
    ratios = [remainder_log_estimate(1, 2, N, 1) / (N * math.log(N)) for N in (20, 40, 80)]
    # approaches (s - t) = -1 slowly from above: the binomial sum contributes ~N log 4
    assert all(r < 0 for r in ratios) and ratios[0] > ratios[1] > ratios[2]
