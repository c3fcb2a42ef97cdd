"""Sets on which no normalised polynomial is small.

A maximal eps-packing of the disk of radius r, with eps = (1-r) r^N / (2N),
forces every degree-N polynomial with sup >= 1 on the unit disk to be at
least r^N / 2 somewhere on the packing.  The LP oracle certifies this.
"""
import time

from pluripolar.witness import build_witness, cheb_lower_oracle

print(f"{'N':>2} {'points':>7} {'eps':>9} {'oracle':>8} {'r^N/2':>8}")
for N in (1, 2, 3):
    t0 = time.time()
    W = build_witness(0.5, N)
    v, det = cheb_lower_oracle(W.points, N, return_details=True)
    print(f"{N:2d} {len(W):7d} {W.eps_used:9.2e} {v:8.4f} {0.5 * 0.5 ** N:8.4f}"
          f"   converged={det['converged']} {time.time() - t0:.1f}s")
