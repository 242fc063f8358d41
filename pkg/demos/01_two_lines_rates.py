"""Alternating projections between two lines: rate = cos^2(theta).

Two lines through the origin meeting at angle theta are the cleanest
test bed for alternating projections: each full cycle (project onto M,
then onto Q) contracts the gap by exactly cos^2(theta). This script
runs the exact solver for a few angles and compares the fitted rate to
the closed form.
"""

import numpy as np

from altproj import AffineSubspace, SolveOptions, fit_rate, run_exact

X_AXIS = AffineSubspace([0, 0], [[1, 0]])

print(f"{'theta':>8} {'iters':>6} {'fitted rate':>12} {'cos^2(theta)':>13}")
for deg in (30, 45, 60, 80):
    theta = np.radians(deg)
    M = AffineSubspace([0, 0], [[np.cos(theta), np.sin(theta)]])
    trace = run_exact(X_AXIS, M, [1, 0], SolveOptions(1e-12, 1000))
    rate = fit_rate(trace).rate
    print(f"{deg:>7}d {trace.iterations:>6} {rate:>12.6f} {np.cos(theta)**2:>13.6f}")

# The negative control: parallel disjoint lines. There is nothing to
# converge to, and the gap stalls at the distance between the sets.
Q = AffineSubspace([0, 1], [[1, 0]])
M = AffineSubspace([0, 0], [[1, 0]])
trace = run_exact(Q, M, [0, 0], SolveOptions(1e-10, 50))
print(f"\nparallel lines: status={trace.status}, stalled gap={trace.final_gap}")
