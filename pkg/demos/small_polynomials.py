"""Integer polynomials that are exponentially small on a curve.

For a set of dimension below n there are integer polynomials P_N of degree N,
coefficients at most exp(N^h), with sup |P_N| < exp(-N^h) on the set.  We find
them by lattice reduction and check each one with interval arithmetic.
"""
import math
import time

import numpy as np

from pluripolar.smallpoly import (SearchConfig, certify_pluripolarity_evidence, search_small_poly,
                                  verify_report)
from pluripolar.trace_space import PointCloud

x = np.linspace(0, 0.25, 400)
curve = PointCloud.from_points(np.stack([x + 0j, np.exp(x) + 0j], 1), R=1.0)

family = []
print(f"{'N':>3} {'a = -log sup':>13} {'N^1.5':>7} {'log max|c|':>11} {'bits':>5} {'time':>6}")
for N in (4, 6, 8, 10):
    t0 = time.time()
    cert = search_small_poly(curve, SearchConfig("lattice_reduce", N=N, h=1.5))
    rep = verify_report(cert, curve, precision_bits=cert.extra["bits"])
    assert rep["ok"]
    family.append((N, cert.P, cert.a))
    print(f"{N:3d} {cert.a:13.2f} {N ** 1.5:7.2f} {math.log(cert.coeff_max):11.2f} "
          f"{cert.extra['bits']:5d} {time.time() - t0:5.1f}s")

# growth of a_N / N is the finite-range evidence for pluripolarity
v = certify_pluripolarity_evidence(family, curve)
print("\na_N/N:", ", ".join(f"{r:.2f}" for r in v.ratios), f"-> evidence: {v.evidence}")
print(v.label)

