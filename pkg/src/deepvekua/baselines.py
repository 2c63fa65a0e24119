"""SIREN and GridMLP baselines with hand-written backward passes.

Both keep their parameters in an ordered ``dict`` of arrays; the flat vector
used by the optimizer concatenates them in insertion order. The third
baseline, the static Vekua cascade, lives in :mod:`deepvekua.model`
(a model whose blocks carry no warp).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .rng import make_rng

Params = dict[str, np.ndarray]


def flatten(params: Params) -> np.ndarray:
    return np.concatenate([a.ravel() for a in params.values()])


def unflatten(template: Params, vec: np.ndarray) -> Params:
    out, pos = {}, 0
    for name, a in template.items():
        out[name] = np.asarray(vec[pos : pos + a.size], dtype=np.float64).reshape(a.shape).copy()
        pos += a.size
    if pos != len(vec):
        raise DimensionMismatch(f"vector of length {len(vec)}, parameters need {pos}")
    return out


# -- SIREN -----------------------------------------------------------------

def siren_init(seed, d: int, hidden: int = 64, layers: int = 4, omega_0: float = 30.0) -> Params:
    """Sitzmann et al. initialization: first layer U(-1/d, 1/d), later ones
    U(-sqrt(6/n)/omega_0, sqrt(6/n)/omega_0); biases follow the same bound."""
    rng = make_rng(seed)
    p: Params = {}
    fan_in = d
    for i in range(layers):
        bound = 1.0 / fan_in if i == 0 else np.sqrt(6.0 / fan_in) / omega_0
        p[f"W{i}"] = rng.uniform(-bound, bound, size=(fan_in, hidden))
        p[f"b{i}"] = rng.uniform(-bound, bound, size=hidden)
        fan_in = hidden
    bound = np.sqrt(6.0 / fan_in) / omega_0
    p["W_out"] = rng.uniform(-bound, bound, size=(fan_in, 1))
    p["b_out"] = np.zeros(1)
    return p


def _siren_layers(p: Params) -> int:
    return sum(1 for k in p if k.startswith("W") and k != "W_out")


def siren_forward(p: Params, x: np.ndarray, omega_0: float = 30.0, return_cache: bool = False):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != p["W0"].shape[0]:
        raise DimensionMismatch(f"x has shape {x.shape}, SIREN expects {p['W0'].shape[0]} columns")
    acts, pres = [x], []
    h = x
    for i in range(_siren_layers(p)):
        pre = omega_0 * (h @ p[f"W{i}"] + p[f"b{i}"])
        h = np.sin(pre)
        pres.append(pre)
        acts.append(h)
    out = (h @ p["W_out"] + p["b_out"])[:, 0]
    return (out, (acts, pres)) if return_cache else out


def siren_loss_and_grad(p: Params, x: np.ndarray, y: np.ndarray, omega_0: float = 30.0):
    pred, (acts, pres) = siren_forward(p, x, omega_0, return_cache=True)
    res = np.asarray(y, dtype=np.float64) - pred
    mse = float(np.mean(res * res))
    g = (-2.0 / res.size) * res[:, None]
    grads: Params = {}
    grads["W_out"] = acts[-1].T @ g
    grads["b_out"] = g.sum(axis=0)
    dh = g @ p["W_out"].T
    for i in range(_siren_layers(p) - 1, -1, -1):
        dpre = dh * np.cos(pres[i]) * omega_0
        grads[f"W{i}"] = acts[i].T @ dpre
        grads[f"b{i}"] = dpre.sum(axis=0)
        dh = dpre @ p[f"W{i}"].T
    return mse, {k: grads[k] for k in p}


# -- GridMLP ---------------------------------------------------------------

def gridmlp_init(seed, d: int, res: int = 32, features: int = 8, head: int = 32, res_1d: int = 128) -> Params:
    """Dense feature grid (``res x res`` in 2-D, ``res_1d`` nodes in 1-D) and a
    one-hidden-layer tanh head."""
    rng = make_rng(seed)
    shape = (res, res, features) if d == 2 else (res_1d, features)
    if d not in (1, 2):
        raise DimensionMismatch(f"GridMLP supports d in (1, 2), got {d}")
    b1 = np.sqrt(6.0 / (features + head))
    b2 = np.sqrt(6.0 / (head + 1))
    return {
        "grid": rng.uniform(-1e-4, 1e-4, size=shape),
        "W1": rng.uniform(-b1, b1, size=(features, head)),
        "b1": np.zeros(head),
        "W2": rng.uniform(-b2, b2, size=(head, 1)),
        "b2": np.zeros(1),
    }


def _cell(pos: np.ndarray, size: int):
    pos = np.clip(pos, 0.0, size - 1.0)
    i0 = np.minimum(np.floor(pos).astype(np.int64), size - 2)
    return i0, pos - i0


def interpolate(grid: np.ndarray, pos: np.ndarray):
    """Multilinear lookup at continuous node positions ``pos`` (N x d, in index units).

    Returns ``(features, (indices, weights))``; the second item lists, for
    each of the 2^d corners, the flat node index and the interpolation weight,
    which is what the backward scatter needs.
    """
    d = pos.shape[1]
    sizes = grid.shape[:d]
    flat = grid.reshape(-1, grid.shape[-1])
    cells = [_cell(pos[:, j], sizes[j]) for j in range(d)]
    corners = []
    for corner in range(2**d):
        idx = np.zeros(pos.shape[0], dtype=np.int64)
        wt = np.ones(pos.shape[0])
        for j in range(d):
            bit = (corner >> (d - 1 - j)) & 1
            i0, t = cells[j]
            idx = idx * sizes[j] + i0 + bit
            wt = wt * (t if bit else 1.0 - t)
        corners.append((idx, wt))
    feats = sum(wt[:, None] * flat[idx] for idx, wt in corners)
    return feats, corners


def _grid_pos(x: np.ndarray, grid: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    sizes = np.array(grid.shape[:d], dtype=np.float64)
    return (x + 1.0) * 0.5 * (sizes - 1.0)


def gridmlp_forward(p: Params, x: np.ndarray, return_cache: bool = False):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != p["grid"].ndim - 1:
        raise DimensionMismatch(f"x has shape {x.shape}, grid is {p['grid'].ndim - 1}-D")
    feats, corners = interpolate(p["grid"], _grid_pos(x, p["grid"]))
    hid = np.tanh(feats @ p["W1"] + p["b1"])
    out = (hid @ p["W2"] + p["b2"])[:, 0]
    return (out, (feats, corners, hid)) if return_cache else out


def gridmlp_loss_and_grad(p: Params, x: np.ndarray, y: np.ndarray):
    pred, (feats, corners, hid) = gridmlp_forward(p, x, return_cache=True)
    res = np.asarray(y, dtype=np.float64) - pred
    mse = float(np.mean(res * res))
    g = (-2.0 / res.size) * res[:, None]
    d_hid = (g @ p["W2"].T) * (1.0 - hid * hid)
    d_feats = d_hid @ p["W1"].T
    d_grid = np.zeros((int(np.prod(p["grid"].shape[:-1])), p["grid"].shape[-1]))
    for idx, wt in corners:
        np.add.at(d_grid, idx, wt[:, None] * d_feats)
    grads = {
        "grid": d_grid.reshape(p["grid"].shape),
        "W1": feats.T @ d_hid,
        "b1": d_hid.sum(axis=0),
        "W2": hid.T @ g,
        "b2": g.sum(axis=0),
    }
    return mse, grads
