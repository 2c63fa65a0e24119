"""Method-by-seed benchmark sweeps producing a results table."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from . import fields
from .training import METHODS, TrainConfig, train, write_metrics


@dataclass
class CellResult:
    method: str
    seed: int
    grid_mse: float
    train_mse: float


def run_cell(cfg: TrainConfig, out_dir: str | None = None) -> CellResult:
    data, grid = fields.generate(cfg.benchmark, cfg.seed, cfg.n_train, cfg.noise_sigma)
    ckpt, metrics = train(cfg, data)
    if out_dir is not None:
        cell = Path(out_dir) / f"{cfg.method}-{cfg.seed}"
        cell.mkdir(parents=True, exist_ok=True)
        ckpt.save(cell / "checkpoint.txt")
        write_metrics(cell / "metrics.csv", metrics)
    return CellResult(cfg.method, cfg.seed, fields.mse_on_grid(ckpt.predict, grid), metrics[-1].train_mse)


def _run(args):
    return run_cell(*args)


def compare(
    benchmark: str,
    seeds: list[int],
    base: TrainConfig | None = None,
    methods: tuple[str, ...] = METHODS,
    out_dir: str | None = None,
    jobs: int = 1,
) -> list[CellResult]:
    base = base or TrainConfig()
    cells = [(replace(base, benchmark=benchmark, method=m, seed=s).validate(), out_dir) for m in methods for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run, cells))
    return [_run(c) for c in cells]


def medians(results: list[CellResult]) -> dict[str, float]:
    by_method: dict[str, list[float]] = {}
    for r in results:
        by_method.setdefault(r.method, []).append(r.grid_mse)
    return {m: statistics.median(v) for m, v in by_method.items()}


def results_csv(results: list[CellResult]) -> str:
    """Long-format table; each method closes with a ``median`` row."""
    lines = ["method,seed,grid_mse"]
    med = medians(results)
    for method in med:
        for r in results:
            if r.method == method:
                lines.append(f"{r.method},{r.seed},{format(r.grid_mse, '.17g')}")
        lines.append(f"{method},median,{format(med[method], '.17g')}")
    return "\n".join(lines) + "\n"


def results_matrix(results: list[CellResult]) -> str:
    """Seeds down, methods across, median in the last row."""
    methods = list(medians(results))
    seeds = sorted({r.seed for r in results})
    table = {(r.method, r.seed): r.grid_mse for r in results}
    width = max(12, *(len(m) + 2 for m in methods))
    lines = ["seed".ljust(8) + "".join(m.rjust(width) for m in methods)]
    for s in seeds:
        lines.append(str(s).ljust(8) + "".join(f"{table.get((m, s), float('nan')):.3e}".rjust(width) for m in methods))
    med = medians(results)
    lines.append("median".ljust(8) + "".join(f"{med[m]:.3e}".rjust(width) for m in methods))
    return "\n".join(lines)
