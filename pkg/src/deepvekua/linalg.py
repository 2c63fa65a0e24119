"""Dense Cholesky factorization and ridge least squares with a hand-written VJP.

Everything runs in float64. The factorization is the plain column-by-column
(Cholesky-Banachiewicz) recurrence, vectorized over rows so that the 64x64
Gram matrices met during training factor in well under a millisecond.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, SolveFailed

MAX_ESCALATIONS = 6
ESCALATION_FACTOR = 10.0


@dataclass(frozen=True)
class RidgeSolution:
    weights: np.ndarray
    lambda_used: float
    chol: np.ndarray  # lower factor of psi.T @ psi + lambda_used * I


def _as_matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def cholesky(a) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefinite
        As soon as a diagonal pivot ``<= 0`` appears; ``pivot_index`` is the
        zero-based column where it happened.
    """
    a = _as_matrix(a, "a")
    n, m = a.shape
    if n != m:
        raise DimensionMismatch(f"matrix must be square, got {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a)))) if n else 1.0
    if not np.allclose(a, a.T, rtol=1e-12, atol=1e-12 * scale):
        raise ValueError("matrix is not symmetric")

    L = np.zeros_like(a)
    for j in range(n):
        row = L[j, :j]
        pivot = a[j, j] - row @ row
        if not pivot > 0.0:
            raise NotPositiveDefinite(j, float(pivot))
        d = np.sqrt(pivot)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ row) / d
    return L


def solve_lower(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Forward substitution ``L x = b``; ``b`` may be a vector or a matrix."""
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(L.shape[0]):
        x[i] = (x[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_upper_t(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution ``L.T x = b`` using the lower factor directly."""
    n = L.shape[0]
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x


def cho_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    return solve_upper_t(L, solve_lower(L, b))


def ridge_solve(psi, r, lam: float) -> RidgeSolution:
    """Minimize ``||psi @ w - r||^2 + lam * ||w||^2`` through the normal equations.

    If the Gram matrix fails to factor, ``lam`` is multiplied by 10 and the
    factorization retried, at most six times. The value that finally worked is
    reported as ``lambda_used``.
    """
    psi = _as_matrix(psi, "psi")
    r = np.asarray(r, dtype=np.float64)
    n, m = psi.shape
    if r.shape != (n,):
        raise DimensionMismatch(f"r has shape {r.shape}, expected ({n},)")
    if n < 1 or m < 1:
        raise DimensionMismatch("psi must have at least one row and one column")
    if not lam > 0.0:
        raise ValueError(f"lambda must be positive, got {lam!r}")

    gram = psi.T @ psi
    # symmetrize exactly; the BLAS product can differ in the last ulp
    gram = 0.5 * (gram + gram.T)
    rhs = psi.T @ r
    diag = np.arange(m)
    lam_try = float(lam)
    for _ in range(MAX_ESCALATIONS + 1):
        a = gram.copy()
        a[diag, diag] += lam_try
        try:
            L = cholesky(a)
        except NotPositiveDefinite:
            lam_try *= ESCALATION_FACTOR
            continue
        return RidgeSolution(cho_solve(L, rhs), lam_try, L)
    raise SolveFailed(
        f"Gram matrix not positive definite after {MAX_ESCALATIONS} "
        f"escalations (last lambda {lam_try / ESCALATION_FACTOR:g})"
    )


def ridge_solve_vjp(psi, r, lam: float, w, g, chol: np.ndarray | None = None):
    """Pull the cotangent ``g`` of the ridge weights back to ``(d_psi, d_r)``.

    With ``A = psi.T psi + lam I`` and ``u = A^{-1} g``::

        d_r   = psi @ u
        d_psi = outer(r - psi @ w, u) - outer(psi @ u, w)

    ``lam`` must be the value actually used in the forward solve
    (``RidgeSolution.lambda_used``). Passing ``chol`` reuses the forward factor.
    """
    psi = _as_matrix(psi, "psi")
    n, m = psi.shape
    r = np.asarray(r, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if r.shape != (n,) or w.shape != (m,) or g.shape != (m,):
        raise DimensionMismatch(
            f"shapes psi {psi.shape}, r {r.shape}, w {w.shape}, g {g.shape} disagree"
        )
    if chol is None:
        a = psi.T @ psi
        a = 0.5 * (a + a.T)
        a[np.arange(m), np.arange(m)] += lam
        chol = cholesky(a)
    u = cho_solve(chol, g)
    psi_u = psi @ u
    d_psi = np.outer(r - psi @ w, u) - np.outer(psi_u, w)
    return d_psi, psi_u
