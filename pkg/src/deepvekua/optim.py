"""Adam over flat parameter vectors, and a central-difference gradient checker."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    lr: float = 2e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, size: int, **hyper) -> "AdamState":
        return cls(np.zeros(size), np.zeros(size), 0, **hyper)


def adam_step(state: AdamState, params: np.ndarray, grads: np.ndarray):
    """One bias-corrected Adam update. Returns ``(new_state, new_params)``; inputs are not modified."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != state.m.shape or grads.shape != state.m.shape:
        raise DimensionMismatch(
            f"params {params.shape} / grads {grads.shape} vs state {state.m.shape}"
        )
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * (grads * grads)
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return replace(state, m=m, v=v, t=t), new_params


@dataclass
class GradCheckReport:
    analytic: np.ndarray
    numeric: np.ndarray
    rel_err: np.ndarray
    tol: float
    checked: np.ndarray = field(repr=False)

    @property
    def worst_index(self) -> int:
        if not self.checked.any():
            return -1
        return int(np.argmax(np.where(self.checked, self.rel_err, -1.0)))

    @property
    def max_rel_err(self) -> float:
        return float(self.rel_err[self.checked].max()) if self.checked.any() else 0.0

    @property
    def passed(self) -> bool:
        return self.max_rel_err < self.tol

    def __str__(self) -> str:
        i = self.worst_index
        status = "PASS" if self.passed else "FAIL"
        if i < 0:
            return f"{status}: no coordinate above threshold"
        return (
            f"{status}: max rel err {self.max_rel_err:.3e} at [{i}] "
            f"(analytic {self.analytic[i]:.6e}, numeric {self.numeric[i]:.6e}), tol {self.tol:g}"
        )


def _value(out) -> float:
    return float(out[0]) if isinstance(out, tuple) else float(out)


_STENCILS = {
    2: ((1.0, 0.5), (-1.0, -0.5)),
    4: ((2.0, -1.0 / 12), (1.0, 8.0 / 12), (-1.0, -8.0 / 12), (-2.0, 1.0 / 12)),
}


def numeric_grad(loss_fn: Callable, params: np.ndarray, step: float = 1e-6, order: int = 2) -> np.ndarray:
    """Central differences with per-coordinate step ``step * max(1, |p_i|)``.

    ``order=2`` is the 3-point stencil; ``order=4`` the 5-point one, which
    tolerates a larger step and so loses fewer digits to cancellation on
    ill-conditioned losses.
    """
    stencil = _STENCILS[order]
    params = np.asarray(params, dtype=np.float64)
    out = np.empty_like(params)
    p = params.copy()
    for i in range(params.size):
        h = step * max(1.0, abs(params[i]))
        acc = 0.0
        for offset, weight in stencil:
            p[i] = params[i] + offset * h
            acc += weight * _value(loss_fn(p))
        p[i] = params[i]
        out[i] = acc / h
    return out


def grad_check(
    loss_fn: Callable,
    params: np.ndarray,
    step: float = 1e-6,
    tol: float = 1e-4,
    *,
    analytic: np.ndarray | None = None,
    threshold: float = 1e-8,
    order: int = 2,
) -> GradCheckReport:
    """Compare an analytic gradient with central differences of ``loss_fn``.

    ``loss_fn`` maps a parameter vector to a scalar, or to ``(scalar, grad)``;
    in the latter case the analytic gradient is read from ``loss_fn(params)``
    unless ``analytic`` is given. Relative error is ``|a - n| / |n|`` and only
    coordinates with ``|a| > threshold`` decide pass/fail.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    params = np.asarray(params, dtype=np.float64)
    if analytic is None:
        out = loss_fn(params.copy())
        if not isinstance(out, tuple):
            raise TypeError("loss_fn returned no gradient and none was passed")
        analytic = out[1]
    analytic = np.asarray(analytic, dtype=np.float64)
    if analytic.shape != params.shape:
        raise DimensionMismatch(f"gradient {analytic.shape} vs params {params.shape}")
    numeric = numeric_grad(loss_fn, params, step, order)
    denom = np.maximum(np.abs(numeric), threshold)
    rel = np.abs(analytic - numeric) / denom
    return GradCheckReport(analytic, numeric, rel, tol, np.abs(analytic) > threshold)
