"""Independent reference computations used as test oracles.

``mp_ridge_grads`` differentiates ``<g, ridge weights>`` by central
differences carried out in 30-digit arithmetic (mpmath LU, no Cholesky), so
neither roundoff nor the package's own solver enters the reference.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 30
_H = mp.mpf("1e-12")


def _objective(psi_rows, r, lam, g):
    P = mp.matrix(psi_rows)
    A = P.T * P + mp.mpf(lam) * mp.eye(P.cols)
    w = mp.lu_solve(A, P.T * mp.matrix(r))
    return mp.fsum(mp.mpf(g[i]) * w[i] for i in range(P.cols))


def mp_ridge_grads(psi, r, lam, g):
    rows = [[mp.mpf(v) for v in row] for row in psi]
    rv = [mp.mpf(v) for v in r]
    d_psi = np.zeros(psi.shape)
    for i in range(psi.shape[0]):
        for j in range(psi.shape[1]):
            orig = rows[i][j]
            rows[i][j] = orig + _H
            fp = _objective(rows, rv, lam, g)
            rows[i][j] = orig - _H
            fm = _objective(rows, rv, lam, g)
            rows[i][j] = orig
            d_psi[i, j] = float((fp - fm) / (2 * _H))
    d_r = np.zeros(len(r))
    for i in range(len(r)):
        orig = rv[i]
        rv[i] = orig + _H
        fp = _objective(rows, rv, lam, g)
        rv[i] = orig - _H
        fm = _objective(rows, rv, lam, g)
        rv[i] = orig
        d_r[i] = float((fp - fm) / (2 * _H))
    return d_psi, d_r


def max_rel_err(analytic, numeric, threshold=1e-8):
    analytic, numeric = np.asarray(analytic), np.asarray(numeric)
    mask = np.abs(analytic) > threshold
    if not mask.any():
        return 0.0
    return float((np.abs(analytic - numeric)[mask] / np.abs(numeric)[mask]).max())
