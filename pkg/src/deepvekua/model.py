"""The DeepVekua residual cascade: forward solve, loss, reverse sweep, inference.

Each block warps the *raw* input coordinates (every block sees the same ``x``),
embeds them in the complex plane, builds the radially-modulated Fourier basis,
fits it to the current residual by ridge least squares, and subtracts its
prediction from the residual handed to the next block.

Inference reuses the weights from the last training solve; the query points
never trigger a solve since their targets are unknown.

The canonical flat parameter order is: blocks in order; within a block
``w_in`` row-major, ``b``, ``w_out`` row-major, then the frequencies' real
parts followed by their imaginary parts. A block without a warp (the static
cascade) contributes only its frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import basis, linalg
from .errors import DimensionMismatch
from .rng import make_rng
from .warp import WarpCache, WarpParams, warp_forward, warp_init, warp_vjp

DEFAULT_LAMBDA = 1e-6


@dataclass
class BlockParams:
    warp: WarpParams | None
    freqs: np.ndarray  # (K, 2): columns u_k, v_k

    @property
    def k(self) -> int:
        return self.freqs.shape[0]


@dataclass
class ModelParams:
    blocks: list[BlockParams]
    lam: float = DEFAULT_LAMBDA
    d: int = 2

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("a model needs at least one block")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")

    @property
    def static(self) -> bool:
        return all(b.warp is None for b in self.blocks)


@dataclass
class SolvedWeights:
    weights: list[np.ndarray]
    lambda_used: list[float]


@dataclass
class _BlockCache:
    warp: WarpCache | None
    zeta: np.ndarray
    psi: np.ndarray
    residual_in: np.ndarray
    solution: linalg.RidgeSolution


@dataclass
class ForwardResult:
    total_pred: np.ndarray
    solved: SolvedWeights
    residual_norms: np.ndarray
    caches: list[_BlockCache] = field(repr=False)


def init_model(
    seed,
    d: int,
    blocks: int = 5,
    k: int = 16,
    hidden: int = 32,
    lam: float = DEFAULT_LAMBDA,
    freq_sigma: float = 3.0,
    static: bool = False,
) -> ModelParams:
    """Seeded initialization.

    Per block the warp is drawn first, then the frequencies. The static variant
    draws (and discards) the same warp so its frequencies match the warped
    model built from the same seed.
    """
    rng = make_rng(seed)
    out = []
    for _ in range(blocks):
        w = warp_init(rng, d, hidden)
        f = basis.init_frequencies(rng, k, freq_sigma)
        out.append(BlockParams(None if static else w, f))
    return ModelParams(out, lam, d)


def _block_zeta(block: BlockParams, x: np.ndarray):
    if block.warp is None:
        return basis.embed_complex(x, np.zeros((x.shape[0], 2))), None
    uv, cache = warp_forward(block.warp, x)
    return basis.embed_complex(x, uv), cache


def forward_train(m: ModelParams, x: np.ndarray, targets: np.ndarray) -> ForwardResult:
    x = np.asarray(x, dtype=np.float64)
    r = np.asarray(targets, dtype=np.float64).reshape(-1)
    if x.shape[0] != r.shape[0] or x.shape[0] < 1:
        raise ValueError(f"{x.shape[0]} coordinates vs {r.shape[0]} targets")
    if not np.all(np.isfinite(r)):
        raise ValueError("targets contain non-finite values")

    total = np.zeros_like(r)
    norms = [float(np.linalg.norm(r))]
    weights, lams, caches = [], [], []
    for block in m.blocks:
        zeta, wcache = _block_zeta(block, x)
        psi = basis.vekua_basis(zeta, block.freqs)
        sol = linalg.ridge_solve(psi, r, m.lam)
        pred = psi @ sol.weights
        caches.append(_BlockCache(wcache, zeta, psi, r, sol))
        total = total + pred
        r = r - pred
        norms.append(float(np.linalg.norm(r)))
        weights.append(sol.weights)
        lams.append(sol.lambda_used)
    return ForwardResult(total, SolvedWeights(weights, lams), np.array(norms), caches)


def mse_of(residual: np.ndarray) -> float:
    return float(np.mean(residual * residual))


def loss_and_grad(m: ModelParams, x: np.ndarray, targets: np.ndarray):
    """Training MSE and its gradient w.r.t. every block's warp and frequencies.

    Returns ``(mse, grads, forward_result)`` where ``grads`` is a list of
    ``BlockParams`` holding gradients in place of parameters.
    """
    fwd = forward_train(m, x, targets)
    n = fwd.total_pred.shape[0]
    final_residual = np.asarray(targets, dtype=np.float64).reshape(-1) - fwd.total_pred
    mse = mse_of(final_residual)

    g_r = (2.0 / n) * final_residual  # cotangent of the residual leaving the current block
    grads: list[BlockParams] = [None] * len(m.blocks)  # type: ignore[list-item]
    for i in range(len(m.blocks) - 1, -1, -1):
        block, c = m.blocks[i], fwd.caches[i]
        w = c.solution.weights
        # r_out = r_in - psi @ w(psi, r_in)
        g_pred = -g_r
        d_psi = np.outer(g_pred, w)
        d_w = c.psi.T @ g_pred
        d_psi_solve, d_r_solve = linalg.ridge_solve_vjp(
            c.psi, c.residual_in, c.solution.lambda_used, w, d_w, chol=c.solution.chol
        )
        d_psi += d_psi_solve
        g_r = g_r + d_r_solve

        d_zeta, d_freqs = basis.vekua_basis_vjp(c.zeta, block.freqs, d_psi)
        # zeta = x (padded) + uv, so the warp output receives d_zeta unchanged
        d_warp = None if block.warp is None else warp_vjp(block.warp, c.warp, d_zeta)
        grads[i] = BlockParams(d_warp, d_freqs)
    return mse, grads, fwd


def predict(m: ModelParams, solved: SolvedWeights, x_query: np.ndarray) -> np.ndarray:
    x_query = np.asarray(x_query, dtype=np.float64)
    if x_query.ndim != 2 or x_query.shape[1] != m.d:
        raise DimensionMismatch(f"query has shape {x_query.shape}, model expects d={m.d}")
    if len(solved.weights) != len(m.blocks):
        raise DimensionMismatch("solved weights do not match the block count")
    total = np.zeros(x_query.shape[0])
    for block, w in zip(m.blocks, solved.weights):
        if w.shape != (4 * block.k,):
            raise DimensionMismatch(f"weights of length {w.shape} for K={block.k}")
        zeta, _ = _block_zeta(block, x_query)
        total = total + basis.vekua_basis(zeta, block.freqs) @ w
    return total


# -- flat parameter vectors ------------------------------------------------

def _block_arrays(b: BlockParams) -> list[np.ndarray]:
    parts = []
    if b.warp is not None:
        parts += [b.warp.w_in, b.warp.b, b.warp.w_out]
    parts += [b.freqs[:, 0], b.freqs[:, 1]]
    return parts


def flatten(blocks: list[BlockParams]) -> np.ndarray:
    return np.concatenate([a.ravel() for b in blocks for a in _block_arrays(b)])


def unflatten(template: ModelParams, vec: np.ndarray) -> ModelParams:
    """Rebuild a model with the shapes of ``template`` from a flat vector."""
    vec = np.asarray(vec, dtype=np.float64)
    expected = sum(a.size for b in template.blocks for a in _block_arrays(b))
    if vec.shape != (expected,):
        raise DimensionMismatch(f"vector of shape {vec.shape}, model needs ({expected},)")
    pos = 0

    def take(shape):
        nonlocal pos
        size = int(np.prod(shape))
        out = vec[pos : pos + size].reshape(shape).copy()
        pos += size
        return out

    blocks = []
    for b in template.blocks:
        warp = None
        if b.warp is not None:
            warp = WarpParams(take(b.warp.w_in.shape), take(b.warp.b.shape), take(b.warp.w_out.shape))
        k = b.k
        freqs = np.stack([take((k,)), take((k,))], axis=1)
        blocks.append(BlockParams(warp, freqs))
    return ModelParams(blocks, template.lam, template.d)


def trainable_mask(m: ModelParams, train_warp: bool = True, train_freqs: bool = True) -> np.ndarray:
    """Boolean mask over the flat vector selecting the parameters that move."""
    mask = []
    for b in m.blocks:
        if b.warp is not None:
            n_warp = b.warp.w_in.size + b.warp.b.size + b.warp.w_out.size
            mask.append(np.full(n_warp, train_warp))
        mask.append(np.full(2 * b.k, train_freqs))
    return np.concatenate(mask)
