"""Analytic benchmark fields, sparse sampling, and dense evaluation grids.

Every field lives on the box [-1, 1]^d. Training points are drawn uniformly
from a Philox stream keyed by the seed; evaluation grids are noise-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import UnknownBenchmark
from .rng import substream

DATA_STREAM = 1

WARP_AMPLITUDE = 0.3
BUMP_WIDTH = 0.3
SQUARE_HALF_WIDTH = 0.5

# (amplitude, wavevector, center) per packet; shared Gaussian window width
PACKETS = (
    (1.0, (3.0 * np.pi, 1.0 * np.pi), (-0.4, -0.3)),
    (0.8, (-1.0 * np.pi, 2.5 * np.pi), (0.35, 0.4)),
    (0.6, (2.0 * np.pi, -2.0 * np.pi), (0.2, -0.5)),
)
PACKET_WIDTH = 0.3


@dataclass
class SampleSet:
    x: np.ndarray  # (N, d)
    y: np.ndarray  # (N,)
    meta: dict = field(default_factory=dict)
    bounds: tuple[np.ndarray, np.ndarray] | None = None  # sampling domain, when known

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def __len__(self) -> int:
        return self.x.shape[0]


@dataclass
class EvalGrid:
    resolution: int
    x: np.ndarray
    y: np.ndarray

    @property
    def d(self) -> int:
        return self.x.shape[1]


def advection_map(x: np.ndarray) -> np.ndarray:
    """(x, y) -> (x + 0.3 sin(pi y), y + 0.3 sin(pi x))."""
    a, b = x[:, 0], x[:, 1]
    return np.stack([a + WARP_AMPLITUDE * np.sin(np.pi * b), b + WARP_AMPLITUDE * np.sin(np.pi * a)], axis=1)


def warped_harmonic(x: np.ndarray) -> np.ndarray:
    return np.sin(4.0 * np.pi * advection_map(x)[:, 0])


def advected_gaussian(x: np.ndarray) -> np.ndarray:
    p = advection_map(x)
    return np.exp(-np.sum(p * p, axis=1) / (2.0 * BUMP_WIDTH**2))


def sdf_square(x: np.ndarray) -> np.ndarray:
    """Exact signed distance to the square |x|, |y| <= 0.5 (negative inside)."""
    q = np.abs(x) - SQUARE_HALF_WIDTH
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
    inside = np.minimum(np.max(q, axis=1), 0.0)
    return outside + inside


def seismic_packets(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape[0])
    for amp, k, c in PACKETS:
        window = np.exp(-np.sum((x - np.array(c)) ** 2, axis=1) / (2.0 * PACKET_WIDTH**2))
        out += amp * window * np.cos(x @ np.array(k))
    return out


def chirp1d(x: np.ndarray) -> np.ndarray:
    return np.sin(20.0 * np.pi * x[:, 0] ** 2)


@dataclass(frozen=True)
class Benchmark:
    fn: Callable[[np.ndarray], np.ndarray]
    d: int
    n_train: int
    noise_sigma: float
    regime: str


BENCHMARKS: dict[str, Benchmark] = {
    "warped_harmonic": Benchmark(warped_harmonic, 2, 256, 0.0, "I"),
    "advected_gaussian": Benchmark(advected_gaussian, 2, 256, 0.0, "I"),
    "sdf_square": Benchmark(sdf_square, 2, 256, 0.0, "I"),
    "seismic_packets": Benchmark(seismic_packets, 2, 256, 0.0, "II"),
    "chirp1d": Benchmark(chirp1d, 1, 128, 0.1, "III"),
}


def get_benchmark(name: str) -> Benchmark:
    try:
        return BENCHMARKS[name]
    except KeyError:
        raise UnknownBenchmark(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None


def grid_points(d: int, resolution: int) -> np.ndarray:
    """Tensor grid on [-1, 1]^d; in 2-D the first coordinate varies slowest."""
    if resolution < 2:
        raise ValueError("grid resolution must be at least 2")
    axis = np.linspace(-1.0, 1.0, resolution)
    if d == 1:
        return axis[:, None]
    a, b = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([a.ravel(), b.ravel()], axis=1)


def generate(
    benchmark: str,
    seed: int,
    n_train: int | None = None,
    noise_sigma: float | None = None,
    resolution: int | None = None,
) -> tuple[SampleSet, EvalGrid]:
    """Sparse noisy training samples plus the noise-free evaluation grid.

    ``None`` arguments fall back to the benchmark's defaults (256 points in
    2-D, 128 in 1-D; noise 0.1 for the chirp, 0 otherwise; a 64x64 grid in
    2-D, 512 points in 1-D).
    """
    spec = get_benchmark(benchmark)
    n = spec.n_train if n_train is None else int(n_train)
    sigma = spec.noise_sigma if noise_sigma is None else float(noise_sigma)
    if n < 1:
        raise ValueError("n_train must be positive")
    if sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    rng = substream(seed, DATA_STREAM)
    x = rng.uniform(-1.0, 1.0, size=(n, spec.d))
    y = spec.fn(x)
    if sigma > 0:
        y = y + sigma * rng.standard_normal(n)
    res = resolution if resolution is not None else (64 if spec.d == 2 else 512)
    gx = grid_points(spec.d, res)
    meta = {"benchmark": benchmark, "seed": int(seed), "noise_sigma": sigma}
    box = (-np.ones(spec.d), np.ones(spec.d))
    return SampleSet(x, y, meta, box), EvalGrid(res, gx, spec.fn(gx))


def mse_on_grid(predict_fn: Callable[[np.ndarray], np.ndarray], grid: EvalGrid) -> float:
    err = np.asarray(predict_fn(grid.x), dtype=np.float64) - grid.y
    return float(np.mean(err * err))
