"""Reading the geometry of a run off its trace.

A finished trace carries enough information to estimate the contraction
rate and the two angles that explain it: the separability angle between
consecutive segments at each M-point (bigger is better) and the
super-regularity angle at each Q-point (>= 90 degrees for convex sets).
The measured rate should sit below cos(alpha) for the smallest
separability angle alpha.
"""

import numpy as np

from altproj import (
    AffineSubspace,
    SolveOptions,
    angles_from_trace,
    compare_predicted,
    fit_rate,
    run_exact,
)

X_AXIS = AffineSubspace([0, 0], [[1, 0]])
theta = np.pi / 4
DIAG = AffineSubspace([0, 0], [[np.cos(theta), np.sin(theta)]])

trace = run_exact(X_AXIS, DIAG, [1, 0], SolveOptions(1e-12, 500))

rate = fit_rate(trace)
print(f"fitted rate            : {rate.rate:.6f}  (quality: {rate.quality})")
print(f"regression cross-check : {rate.rate_regression:.6f}  R^2 = {rate.r_squared:.6f}")

angles = angles_from_trace(trace)
print(f"min separability angle : {np.degrees(angles.min_separability):.2f} deg")
print(f"min super-regularity   : {np.degrees(angles.min_super_regularity):.2f} deg")

comparison = compare_predicted(rate, angles.min_separability)
print(f"\nmeasured  {comparison['measured']:.4f}  vs  cos(alpha) = "
      f"{comparison['predicted']:.4f}   flags: {comparison['flags'] or 'none'}")

# Traces serialize to CSV (17 significant digits, bit-deterministic),
# which is also what `altproj solve --trace` writes.
print("\nfirst three CSV rows:")
print("\n".join(trace.to_csv().splitlines()[:4]))
