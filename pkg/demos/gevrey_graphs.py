"""Gevrey functions, the power bound and the explicit covering bound.

Calibrates derivative constants from exact rational jets, checks the bound
on derivatives of powers f^k, rejects a family whose claimed order is too
small, and prints the explicit covering bound for the graph w = e^x.
"""
import math

from pluripolar.gevrey import check_power_bound, make_gevrey_family, validate_family
from pluripolar.kdim import section5_bound

f = make_gevrey_family(1, "analytic_rational", {"num": [1], "den": [1, 0, 1]}, box=[[-1, 1]])
for k in range(1, 6):
    rep = check_power_bound(f, k, 10)
    print(f"1/(1+x^2), k={k}: {rep.checked} exact checks, {len(rep.violations)} violations, C={rep.C:g}")

for s, sigma in ((2, 2), (1, 2)):
    lac = make_gevrey_family(s, "lacunary_cosine", {"sigma": sigma})
    rep = validate_family(lac, 12)
    print(f"lacunary sigma={sigma} claimed s={s}: growth slope {rep['growth_slope']:.2f} "
          f"-> {'accepted' if rep['accepted'] else 'rejected'}")

e = make_gevrey_family(1, "exponential", {"A": 1, "lam": 1}, box=[[0, 0.25]])
validate_family(e)
print(f"\ne^x on [0, 1/4]: C = {e.C:.4f}")
for N in (10, 20, 40, 80):
    b = section5_bound(N, 1, 1.5, 1, e.C)
    print(f"N={N:3d}: log eps = {b['log_eps']:8.2f}   H <= {b['H']:.3e}   H / (N^2.5 log N) = {b['normalized']:.3f}")
print("dimension bound m*s = 1 < n = 2: the graph is pluripolar")
