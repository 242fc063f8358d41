"""Dense small-scale linear algebra kernels.

QR-based least squares, SPD solves, and SVD at desk scale (dims <= 100).
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonConvergence, NotPositiveDefinite, RankDeficient

RANK_TOL = 1e-10   # relative threshold on R diagonal / singular values
SOLVE_TOL = 1e-12  # relative residual for SPD solves
ORTHO_TOL = 1e-9   # orthonormality slack for SVD factors


def as_vector(x, dim=None):
    """Coerce to a finite 1-D float array, checking dimension if given."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise DimensionMismatch("vector contains NaN/Inf entries")
    return v


def as_matrix(a, rows=None, cols=None):
    """Coerce to a finite 2-D float array, checking shape if given."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise DimensionMismatch(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise DimensionMismatch(f"expected {cols} cols, got {m.shape[1]}")
    if m.size and not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix contains NaN/Inf entries")
    return m


def least_squares(A, b):
    """Unique minimizer of |As - b| for full-column-rank A, via Householder QR.

    Raises RankDeficient if the numerical column rank (smallest |R_ii|
    relative to the largest) falls below RANK_TOL.
    """
    A = as_matrix(A)
    m, n = A.shape
    b = as_vector(b, dim=m)
    if n == 0:
        return np.zeros(0)
    if n > m:
        raise RankDeficient(f"{m}x{n} matrix cannot have full column rank")
    Q, R = np.linalg.qr(A, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag.min() <= RANK_TOL * max(diag.max(), RANK_TOL):
        raise RankDeficient("numerical column rank below full")
    from scipy.linalg import solve_triangular

    return solve_triangular(R, Q.T @ b, lower=False)


def solve_spd(S, b):
    """Solve Sx = b for symmetric positive definite S via Cholesky."""
    S = as_matrix(S)
    if S.shape[0] != S.shape[1]:
        raise DimensionMismatch("solve_spd needs a square matrix")
    b = as_vector(b, dim=S.shape[0])
    if S.shape[0] == 0:
        return np.zeros(0)
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    from scipy.linalg import solve_triangular

    y = solve_triangular(L, b, lower=True)
    return solve_triangular(L.T, y, lower=False)


def svd(A):
    """Full-matrix SVD: A = U diag(sigma) V^T, sigma nonincreasing >= 0."""
    A = as_matrix(A)
    try:
        U, sigma, Vt = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    return U, sigma, Vt.T
