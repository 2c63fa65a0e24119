"""Complex embedding of warped coordinates and the radially-modulated Fourier basis.

A complex coordinate ``zeta`` is stored as an ``(N, 2)`` float array of
``[real, imag]`` columns, and a frequency set as a ``(K, 2)`` array of
``[u_k, v_k]``. The basis matrix has ``4K`` columns laid out as
``[sin | cos | |zeta| sin | |zeta| cos]``.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, UnsupportedDimension


def embed_complex(x: np.ndarray, uv: np.ndarray) -> np.ndarray:
    """Map raw coordinates plus a warp displacement into the complex plane.

    For 2-D inputs ``zeta = (x1 + u1) + i (x2 + u2)``. A 1-D input becomes the
    curve ``zeta = (x + u1) + i u2``.
    """
    x = np.asarray(x, dtype=np.float64)
    uv = np.asarray(uv, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] not in (1, 2):
        raise UnsupportedDimension(f"coordinates must be (N, 1) or (N, 2), got {x.shape}")
    if uv.shape != (x.shape[0], 2):
        raise DimensionMismatch(f"warp output has shape {uv.shape}, expected ({x.shape[0]}, 2)")
    zeta = uv.copy()
    zeta[:, : x.shape[1]] += x
    return zeta


def init_frequencies(rng: np.random.Generator, k: int, sigma: float = 3.0) -> np.ndarray:
    return sigma * rng.standard_normal((k, 2))


def _phase(zeta: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    # Re(zeta * conj(f)) = x u + y v
    return zeta @ freqs.T


def vekua_basis(zeta: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    zeta = np.asarray(zeta, dtype=np.float64)
    freqs = np.asarray(freqs, dtype=np.float64)
    if zeta.ndim != 2 or zeta.shape[1] != 2:
        raise DimensionMismatch(f"zeta must be (N, 2), got {zeta.shape}")
    if freqs.ndim != 2 or freqs.shape[1] != 2 or freqs.shape[0] < 1:
        raise DimensionMismatch(f"freqs must be (K, 2) with K >= 1, got {freqs.shape}")
    phi = _phase(zeta, freqs)
    s, c = np.sin(phi), np.cos(phi)
    mag = np.hypot(zeta[:, 0], zeta[:, 1])[:, None]
    return np.concatenate([s, c, s * mag, c * mag], axis=1)


def vekua_basis_vjp(zeta: np.ndarray, freqs: np.ndarray, d_psi: np.ndarray):
    """Gradients of ``<d_psi, vekua_basis(zeta, freqs)>`` w.r.t. ``zeta`` and ``freqs``.

    The modulus is not differentiable at ``zeta = 0``; its gradient there is
    taken to be zero.
    """
    zeta = np.asarray(zeta, dtype=np.float64)
    freqs = np.asarray(freqs, dtype=np.float64)
    d_psi = np.asarray(d_psi, dtype=np.float64)
    n, k = zeta.shape[0], freqs.shape[0]
    if d_psi.shape != (n, 4 * k):
        raise DimensionMismatch(f"d_psi has shape {d_psi.shape}, expected ({n}, {4 * k})")

    phi = _phase(zeta, freqs)
    s, c = np.sin(phi), np.cos(phi)
    mag = np.hypot(zeta[:, 0], zeta[:, 1])
    g_s, g_c, g_rs, g_rc = np.split(d_psi, 4, axis=1)

    d_phi = g_s * c - g_c * s + mag[:, None] * (g_rs * c - g_rc * s)
    d_mag = np.sum(g_rs * s + g_rc * c, axis=1)

    safe = np.where(mag > 0.0, mag, 1.0)
    unit = np.where(mag[:, None] > 0.0, zeta / safe[:, None], 0.0)
    d_zeta = d_phi @ freqs + d_mag[:, None] * unit
    d_freqs = d_phi.T @ zeta
    return d_zeta, d_freqs
