"""Drivers for exact, inexact, and approximate alternating projections.

Every run produces an IterationTrace: one row per iteration with the
iterate, the other-set point, the gap between them, and the per-set
distances.  Traces are the single input to the diagnostics module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch
from .sets import ProjectableSet

CONVERGED = "Converged"
MAX_ITERS = "MaxIters"
LINEARIZATION_INFEASIBLE = "LinearizationInfeasible"
DIVERGED = "Diverged"
RANK_DEFICIENT = "RankDeficient"

DIVERGENCE_WINDOW = 20
DIVERGENCE_FACTOR = 10.0


@dataclass
class SolveOptions:
    gap_tol: float = 1e-10
    max_iters: int = 10_000
    epsilon: float = 0.0

    def __post_init__(self):
        if self.gap_tol <= 0:
            raise ValueError("gap_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")


@dataclass
class IterationTrace:
    """Per-iteration record of one alternating-projection run.

    Row k holds the iterate zs[k], the other-set point xs[k] produced
    from it, gap = |zs[k] - xs[k]|, and the distances of zs[k] to each
    set (NaN when a set admits no exact distance).
    """

    zs: list = field(default_factory=list)
    xs: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    dist_q: list = field(default_factory=list)
    dist_m: list = field(default_factory=list)
    status: str = MAX_ITERS
    initial_projected: bool = False

    def add_row(self, z, x, gap, dq, dm):
        if self.gaps and gap < 0:
            raise ValueError("gaps must be nonnegative")
        self.zs.append(np.asarray(z, dtype=float))
        self.xs.append(np.asarray(x, dtype=float))
        self.gaps.append(float(gap))
        self.dist_q.append(float(dq))
        self.dist_m.append(float(dm))

    @property
    def iterations(self):
        return max(len(self.gaps) - 1, 0)

    @property
    def final_gap(self):
        return self.gaps[-1] if self.gaps else float("nan")

    def diverging(self):
        g = self.gaps
        k = len(g) - 1
        return (
            k >= DIVERGENCE_WINDOW
            and g[k] > DIVERGENCE_FACTOR * g[k - DIVERGENCE_WINDOW]
        )

    # CSV schema: k, gap, dist_Q, dist_M, z_0..z_{d-1}; 17 significant digits.

    def to_csv(self):
        if not self.zs:
            return "k,gap,dist_Q,dist_M\n"
        d = self.zs[0].shape[0]
        header = "k,gap,dist_Q,dist_M," + ",".join(f"z_{i}" for i in range(d))
        lines = [header]
        for k in range(len(self.gaps)):
            nums = [self.gaps[k], self.dist_q[k], self.dist_m[k]] + list(self.zs[k])
            lines.append(str(k) + "," + ",".join(f"{v:.17g}" for v in nums))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text, status=None):
        lines = [ln for ln in text.strip().splitlines() if ln]
        if not lines or not lines[0].startswith("k,gap,dist_Q,dist_M"):
            raise ValueError("trace CSV missing header row")
        trace = IterationTrace()
        for ln in lines[1:]:
            parts = ln.split(",")
            vals = [float(v) for v in parts[1:]]
            trace.zs.append(np.array(vals[3:]))
            trace.xs.append(None)
            trace.gaps.append(vals[0])
            trace.dist_q.append(vals[1])
            trace.dist_m.append(vals[2])
        if status is not None:
            trace.status = status
        return trace


class InexactProjector:
    """Wraps a set with a rule producing x with d_{P_M(z)}(x) <= eps d_M(z)."""

    def __init__(self, set_m: ProjectableSet, eps=0.0, direction_seed=42):
        self.set = set_m
        self.eps = float(eps)
        self.direction_seed = int(direction_seed)

    def project(self, z, k):
        exact = self.set.project(z)
        if self.eps == 0.0:
            return exact
        d = float(np.linalg.norm(z - exact))
        if d == 0.0:
            return exact
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.direction_seed, spawn_key=(k,))
        )
        u = rng.standard_normal(exact.shape[0])
        nu = np.linalg.norm(u)
        while nu == 0.0:  # vanishing draw; essentially impossible
            u = rng.standard_normal(exact.shape[0])
            nu = np.linalg.norm(u)
        return exact + (self.eps * d / nu) * u


def make_corrupting_projector(set_m: ProjectableSet, eps, direction_seed=42):
    """Deterministic eps-corrupted projector onto set_m (test harness)."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return InexactProjector(set_m, eps, direction_seed)


class ApproximateProjector:
    """Base-point approximate projection onto a set M, keeping iterates on M.

    step(z, y) returns the next point z' in M approximating P_M(y),
    given the previous iterate z in M.
    """

    def start(self, z0):
        return np.asarray(z0, dtype=float)

    def step(self, z, y):
        raise NotImplementedError

    def dist_to_set(self, z):
        return 0.0


class ExactApproximateProjector(ApproximateProjector):
    """The eps = 0 instance: plain exact projection onto M."""

    def __init__(self, set_m: ProjectableSet):
        self.set = set_m

    def start(self, z0):
        z0 = np.asarray(z0, dtype=float)
        if self.set.distance(z0) > 1e-9:
            raise ValueError("starting point must lie on M")
        return z0

    def step(self, z, y):
        return self.set.project(y)

    def dist_to_set(self, z):
        return self.set.distance(z)


def run_exact(Q: ProjectableSet, M: ProjectableSet, z0, opts=None) -> IterationTrace:
    """Exact alternating projections: x <- P_M(z), z <- P_Q(x)."""
    return run_inexact(Q, InexactProjector(M, 0.0), z0, opts)


def run_inexact(Q: ProjectableSet, M_inexact: InexactProjector, z0, opts=None):
    """Inexact alternating projections with an eps-corrupted M step.

    With epsilon = 0 the trace is bit-identical to run_exact.
    """
    opts = opts or SolveOptions()
    if Q.ambient_dim != M_inexact.set.ambient_dim:
        raise DimensionMismatch("Q and M live in different ambient spaces")
    z = linalg.as_vector(z0, dim=Q.ambient_dim)
    trace = IterationTrace()
    if Q.distance(z) > 1e-12:
        z = Q.project(z)
        trace.initial_projected = True

    for k in range(opts.max_iters + 1):
        x = M_inexact.project(z, k)
        gap = float(np.linalg.norm(z - x))
        trace.add_row(z, x, gap, Q.distance(z), M_inexact.set.distance(z))
        if gap <= opts.gap_tol:
            trace.status = CONVERGED
            return trace
        if trace.diverging():
            trace.status = DIVERGED
            return trace
        if k == opts.max_iters:
            break
        z = Q.project(x)
    trace.status = MAX_ITERS
    return trace


def run_approximate(M_approx: ApproximateProjector, Q: ProjectableSet, z0, opts=None):
    """Approximate alternating projections keeping iterates on M.

    y <- P_Q(z); z <- Phi(z, y) in M.
    """
    opts = opts or SolveOptions()
    z = M_approx.start(linalg.as_vector(z0, dim=Q.ambient_dim))
    trace = IterationTrace()

    for k in range(opts.max_iters + 1):
        y = Q.project(z)
        gap = float(np.linalg.norm(z - y))
        trace.add_row(z, y, gap, gap, M_approx.dist_to_set(z))
        if gap <= opts.gap_tol:
            trace.status = CONVERGED
            return trace
        if trace.diverging():
            trace.status = DIVERGED
            return trace
        if k == opts.max_iters:
            break
        z = M_approx.step(z, y)
    trace.status = MAX_ITERS
    return trace
