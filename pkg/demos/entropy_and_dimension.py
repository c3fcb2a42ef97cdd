"""Entropy of trace spaces and the fitted Kolmogorov dimension.

A disk in C is as "large" as a set in C can be: its dimension is 1.  A point
has dimension 0.  A real-analytic curve in C^2 sits strictly between, which
is what makes it pluripolar.  This script measures all three.
"""
import numpy as np

from pluripolar.kdim import EpsSchedule, estimate_psi
from pluripolar.trace_space import PointCloud, entropy_lower, entropy_upper

g = np.linspace(-0.25, 0.25, 25)
Z = (g[:, None] + 1j * g[None, :]).ravel()
disk = PointCloud.from_points(Z[np.abs(Z) <= 0.25][:, None], R=1.0, center=[0j], label="disk r=1/4")
point = PointCloud.from_points([[0j]], R=1.0, label="point")
x = np.linspace(0, 0.25, 400)
curve = PointCloud.from_points(np.stack([x + 0j, np.exp(x) + 0j], 1), R=1.0, label="(x, e^x)")

# upper bounds grow like (log 1/eps)^(n+1) for the disk and like log(1/eps) for the point
print(f"{'eps':>8} {'disk':>10} {'point':>10} {'curve':>10}")
for eps in (1e-2, 1e-3, 1e-4, 1e-5):
    row = [entropy_upper(X, eps).h_upper for X in (disk, point, curve)]
    print(f"{eps:8.0e} " + " ".join(f"{h:10.2f}" for h in row))

# the sampled lower bound saturates at log(samples): it certifies little at small eps
lo = entropy_lower(disk, 1e-2, samples=200)
print(f"\nsampled lower bound at eps={lo.eps:g}: {lo.h_lower:.2f} (log 200 = {np.log(200):.2f})")

sched = EpsSchedule.logspaced(1e-2, 1e-5, 10)
print("\nfitted Psi (upper):")
for X in (disk, point, curve):
    est = estimate_psi(X, sched, lower=False)
    print(f"  {X.label:12s} {est.psi_upper:6.3f}   plain log-log slope - 1: {est.fit['upper']['plain_slope'] - 1:6.3f}")

# domain independence: the outer polydisk radius barely moves the estimate
for R in (1.0, 2.0, 4.0):
    est = estimate_psi(disk.with_radius(R), sched, lower=False)
    print(f"  disk with R={R:3.1f}: {est.psi_upper:6.3f}")
