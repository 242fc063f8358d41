"""Dense active-set solver for nearest-point problems over polyhedra.

Solves   minimize 1/2 |x - z|^2
         subject to A_ineq x <= b_ineq,  A_eq x = b_eq

by maintaining a working set of active rows, re-solving the associated
equality-constrained projection at every pivot.  The Hessian is the
identity, so each working-set solve reduces to one small SPD system.
Ties are broken by lowest index (Bland-style) to prevent cycling, with a
hard pivot cap for degenerate data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch, Infeasible, MaxPivots

FEAS_TOL = 1e-9     # primal feasibility (two orders above linalg tolerances)
DUAL_TOL = 1e-10    # multiplier nonnegativity slack
DEP_TOL = 1e-10     # linear-dependence threshold when growing the working set


@dataclass
class ProjectionQp:
    """Data of one nearest-point QP."""

    target: np.ndarray
    A_ineq: np.ndarray
    b_ineq: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        self.target = linalg.as_vector(self.target)
        n = self.target.shape[0]
        self.A_ineq = linalg.as_matrix(
            np.asarray(self.A_ineq, dtype=float).reshape(-1, n), cols=n
        )
        self.b_ineq = linalg.as_vector(
            np.asarray(self.b_ineq, dtype=float).reshape(-1), dim=self.A_ineq.shape[0]
        ) if self.A_ineq.shape[0] else np.zeros(0)
        self.A_eq = linalg.as_matrix(
            np.asarray(self.A_eq, dtype=float).reshape(-1, n), cols=n
        )
        self.b_eq = linalg.as_vector(
            np.asarray(self.b_eq, dtype=float).reshape(-1), dim=self.A_eq.shape[0]
        ) if self.A_eq.shape[0] else np.zeros(0)

    @property
    def dim(self):
        return self.target.shape[0]


@dataclass
class KktCertificate:
    """Solution plus the multipliers/slacks certifying optimality."""

    solution: np.ndarray
    ineq_multipliers: np.ndarray
    slacks: np.ndarray
    eq_multipliers: np.ndarray
    active_set: list = field(default_factory=list)


def solve_projection_qp(p: ProjectionQp) -> KktCertificate:
    """Project p.target onto the polyhedron, returning a full certificate.

    Raises Infeasible (with a Farkas witness) if the polyhedron is empty,
    MaxPivots if the active-set loop cycles past its cap.
    """
    n = p.dim
    n_i = p.A_ineq.shape[0]
    n_e = p.A_eq.shape[0]
    rows = np.vstack([p.A_ineq, p.A_eq]) if (n_i + n_e) else np.zeros((0, n))
    rhs = np.concatenate([p.b_ineq, p.b_eq])
    is_eq = np.zeros(n_i + n_e, dtype=bool)
    is_eq[n_i:] = True

    work: list[int] = []   # indices into rows, full row rank maintained

    def solve_working(extra=None):
        idx = work if extra is None else work + [extra]
        N = rows[idx]
        lam = linalg.solve_spd(N @ N.T, N @ p.target - rhs[idx]) if idx else np.zeros(0)
        x = p.target - (N.T @ lam if idx else 0.0)
        return x, lam

    def dependence(a):
        """Coefficients u with rows[work]^T u ~ a, or None if independent."""
        if not work:
            return None if np.linalg.norm(a) > DEP_TOL else np.zeros(0)
        N = rows[work]
        u = linalg.solve_spd(N @ N.T, N @ a)
        resid = a - N.T @ u
        if np.linalg.norm(resid) > DEP_TOL * (1.0 + np.linalg.norm(a)):
            return None
        return u

    # Seed the working set with the equality rows; dependent-but-consistent
    # rows are redundant and skipped, inconsistent ones certify emptiness.
    for j in range(n_i, n_i + n_e):
        u = dependence(rows[j])
        if u is None:
            work.append(j)
            continue
        if abs(rhs[j] - u @ rhs[work]) > FEAS_TOL:
            y_ineq = np.zeros(n_i)
            y_eq = np.zeros(n_e)
            y_eq[j - n_i] = 1.0
            for coeff, k in zip(-u, work):
                y_eq[k - n_i] += coeff
            if rhs[j] - u @ rhs[work] > 0:
                y_ineq, y_eq = y_ineq, -y_eq
            raise Infeasible("inconsistent equality constraints", y_ineq, y_eq)

    max_pivots = 100 * max(1, n_i + n_e)
    for _ in range(max_pivots):
        x, lam = solve_working()

        # Dual feasibility: active inequality multipliers must be >= 0.
        drop = None
        for pos, j in enumerate(work):
            if not is_eq[j] and lam[pos] < -DUAL_TOL:
                drop = pos
                break
        if drop is not None:
            work.pop(drop)
            continue

        # Primal feasibility: pick the lowest-index violated inequality.
        enter = None
        for j in range(n_i):
            if j in work:
                continue
            if rows[j] @ x - rhs[j] > FEAS_TOL:
                enter = j
                break
        if enter is None:
            return _certificate(p, x, lam, work, n_i, n_e)

        u = dependence(rows[enter])
        if u is None:
            work.append(enter)
            continue

        # rows[enter] depends on the working set.  If no active inequality
        # can be relaxed (all dependence coefficients on inequality rows
        # <= 0), the violation is structural: Farkas certificate.
        relax = [
            (pos, j) for pos, j in enumerate(work) if not is_eq[j] and u[pos] > DEP_TOL
        ]
        if not relax:
            y_ineq = np.zeros(n_i)
            y_eq = np.zeros(n_e)
            y_ineq[enter] = 1.0
            for pos, j in enumerate(work):
                if is_eq[j]:
                    y_eq[j - n_i] += -u[pos]
                else:
                    y_ineq[j] += -u[pos]
            raise Infeasible("polyhedron is empty", y_ineq, y_eq)
        work.pop(relax[0][0])
        work.append(enter)

    raise MaxPivots(f"active-set pivot cap {max_pivots} exceeded")


def _certificate(p, x, lam, work, n_i, n_e):
    w = np.zeros(n_i)
    y = np.zeros(n_e)
    for pos, j in enumerate(work):
        if j < n_i:
            w[j] = max(lam[pos], 0.0)
        else:
            y[j - n_i] = lam[pos]
    slacks = p.b_ineq - p.A_ineq @ x if n_i else np.zeros(0)
    slacks = np.where(np.abs(slacks) < FEAS_TOL, np.maximum(slacks, 0.0), slacks)
    active = sorted(j for j in work if j < n_i)
    return KktCertificate(x, w, slacks, y, active)


def min_norm_step(A_ineq, b_ineq, A_eq, b_eq) -> np.ndarray:
    """Minimal-norm s with A_ineq s <= b_ineq and A_eq s = b_eq.

    Same program as solve_projection_qp with target 0.
    """
    A_ineq = np.asarray(A_ineq, dtype=float)
    A_eq = np.asarray(A_eq, dtype=float)
    if A_ineq.ndim != 2 or A_eq.ndim != 2:
        raise DimensionMismatch("constraint blocks must be 2-D")
    n = A_ineq.shape[1] if A_ineq.shape[1] else A_eq.shape[1]
    if A_ineq.shape[1] != n or A_eq.shape[1] != n:
        raise DimensionMismatch("constraint blocks disagree on dimension")
    cert = solve_projection_qp(ProjectionQp(np.zeros(n), A_ineq, b_ineq, A_eq, b_eq))
    return cert.solution


def verify_certificate(p: ProjectionQp, cert: KktCertificate, tol=FEAS_TOL):
    """Independent KKT check; returns the max violation across conditions."""
    x, w, s, y = cert.solution, cert.ineq_multipliers, cert.slacks, cert.eq_multipliers
    v = 0.0
    if p.A_ineq.shape[0]:
        v = max(v, float(np.max(p.A_ineq @ x - p.b_ineq, initial=0.0)))
        v = max(v, float(np.max(-w, initial=0.0)))
        v = max(v, float(np.max(-s, initial=0.0)))
        v = max(v, abs(float(w @ s)))
        v = max(v, float(np.max(np.abs(p.b_ineq - p.A_ineq @ x - s))))
    if p.A_eq.shape[0]:
        v = max(v, float(np.max(np.abs(p.A_eq @ x - p.b_eq))))
    stat = x - p.target
    if p.A_ineq.shape[0]:
        stat = stat + p.A_ineq.T @ w
    if p.A_eq.shape[0]:
        stat = stat + p.A_eq.T @ y
    v = max(v, float(np.linalg.norm(stat)))
    return v
