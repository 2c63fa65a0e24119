"""Single-hidden-layer sinusoidal deformation field ``u(x) = sin(x W + b) W_out``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, UnsupportedDimension

OMEGA_0 = 6.0


@dataclass
class WarpParams:
    w_in: np.ndarray  # (d, H)
    b: np.ndarray  # (H,)
    w_out: np.ndarray  # (H, 2)

    @property
    def d(self) -> int:
        return self.w_in.shape[0]

    @property
    def hidden(self) -> int:
        return self.w_in.shape[1]


@dataclass
class WarpCache:
    x: np.ndarray
    pre: np.ndarray
    h: np.ndarray


def warp_init(rng: np.random.Generator, d: int, hidden: int = 32, omega_0: float = OMEGA_0) -> WarpParams:
    """Random input layer, zero output head: the initial warp is the identity map."""
    if d not in (1, 2):
        raise UnsupportedDimension(f"d must be 1 or 2, got {d}")
    if hidden < 1:
        raise ValueError("hidden width must be positive")
    bound = omega_0 / d
    w_in = rng.uniform(-bound, bound, size=(d, hidden))
    b = rng.uniform(-np.pi, np.pi, size=hidden)
    return WarpParams(w_in, b, np.zeros((hidden, 2)))


def warp_forward(p: WarpParams, x: np.ndarray):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != p.d:
        raise DimensionMismatch(f"x has shape {x.shape}, warp expects {p.d} columns")
    pre = x @ p.w_in + p.b
    h = np.sin(pre)
    return h @ p.w_out, WarpCache(x, pre, h)


def warp_vjp(p: WarpParams, cache: WarpCache, d_uv: np.ndarray) -> WarpParams:
    d_uv = np.asarray(d_uv, dtype=np.float64)
    if d_uv.shape != (cache.x.shape[0], 2):
        raise DimensionMismatch(f"d_uv has shape {d_uv.shape}, expected ({cache.x.shape[0]}, 2)")
    d_w_out = cache.h.T @ d_uv
    d_pre = (d_uv @ p.w_out.T) * np.cos(cache.pre)
    return WarpParams(cache.x.T @ d_pre, d_pre.sum(axis=0), d_w_out)
