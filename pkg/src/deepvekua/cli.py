"""Command-line entry point: ``deepvekua {generate,train,eval,render,compare}``.

Exit codes: 0 success, 1 bad arguments or configuration, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import fields, harness, render
from .errors import ConfigError, DeepVekuaError, SolveFailed, UnknownBenchmark
from .serialization import read_samples, read_table, write_samples, write_table
from .training import METHODS, Checkpoint, TrainConfig, TrainingAborted, train, write_metrics

log = logging.getLogger("deepvekua")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="deepvekua", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write train.csv and grid.csv for a benchmark")
    g.add_argument("--benchmark", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--n-train", type=int)
    g.add_argument("--noise-sigma", type=float)
    g.add_argument("--resolution", type=int)

    t = sub.add_parser("train", help="train one model from a key=value config file")
    t.add_argument("--config", required=True)
    t.add_argument("--out", help="override the config's output directory")

    e = sub.add_parser("eval", help="grid MSE of a checkpoint")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--grid", required=True, help="grid.csv or train.csv")
    e.add_argument("--out", help="directory for eval.csv and pred.csv (default: checkpoint's)")

    r = sub.add_parser("render", help="draw a field CSV as a PPM image")
    r.add_argument("--field", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--column", help="value column (default: last)")

    c = sub.add_parser("compare", help="all methods x seeds on one benchmark")
    c.add_argument("--benchmark", required=True)
    c.add_argument("--seeds", type=int, nargs="+", required=True)
    c.add_argument("--config", help="base config; benchmark, method and seed are overridden")
    c.add_argument("--iters", type=int)
    c.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    c.add_argument("--out", default=".")
    c.add_argument("--jobs", type=int, default=1)
    return p


def _load_config(path: str) -> TrainConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return TrainConfig.from_text(text)


def cmd_generate(args) -> int:
    fields.get_benchmark(args.benchmark)
    data, grid = fields.generate(args.benchmark, args.seed, args.n_train, args.noise_sigma, args.resolution)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_samples(out / "train.csv", data.x, data.y, "y")
    write_samples(out / "grid.csv", grid.x, grid.y, "y_true")
    log.info("wrote %d training rows and %d grid rows to %s", len(data), len(grid.y), out)
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args.config)
    if args.out:
        cfg = replace(cfg, out=args.out)
    if cfg.data:
        x, y, _ = read_samples(cfg.data)
        data = fields.SampleSet(x, y, {"benchmark": cfg.benchmark, "seed": cfg.seed, "source": cfg.data})
    else:
        data, _ = fields.generate(cfg.benchmark, cfg.seed, cfg.n_train, cfg.noise_sigma)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        ckpt, metrics = train(cfg, data)
    except TrainingAborted as exc:
        write_metrics(out / "metrics.csv", exc.metrics)
        raise
    ckpt.save(out / "checkpoint.txt")
    write_metrics(out / "metrics.csv", metrics)
    print(f"final train_mse {metrics[-1].train_mse:.6e}")
    return 0


def cmd_eval(args) -> int:
    try:
        ckpt = Checkpoint.load(args.checkpoint)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load checkpoint {args.checkpoint}: {exc}") from None
    x, y_true, _ = read_samples(args.grid)
    if x.shape[1] != ckpt.d:
        raise ConfigError(f"grid is {x.shape[1]}-D but the checkpoint is {ckpt.d}-D")
    pred = ckpt.predict(x)
    err = pred - y_true
    mse = float((err * err).mean())
    out = Path(args.out) if args.out else Path(args.checkpoint).parent
    out.mkdir(parents=True, exist_ok=True)
    (out / "eval.csv").write_text(f"method,seed,grid_mse\n{ckpt.method},{ckpt.seed},{format(mse, '.17g')}\n")
    write_samples(out / "pred.csv", x, pred, "y_pred")
    print(f"grid_mse {format(mse, '.17g')}")
    return 0


def cmd_render(args) -> int:
    header, data = read_table(args.field)
    d = sum(1 for h in header if h.startswith("x"))
    if d not in (1, 2) or d >= len(header):
        raise ConfigError(f"{args.field}: expected header x0[,x1],<value>")
    col = len(header) - 1
    if args.column:
        if args.column not in header:
            raise ConfigError(f"no column {args.column!r} in {args.field}")
        col = header.index(args.column)
    render.render_field(data[:, :d], data[:, col], args.out)
    return 0


def cmd_compare(args) -> int:
    base = _load_config(args.config) if args.config else TrainConfig()
    if args.iters is not None:
        base = replace(base, iters=args.iters)
    fields.get_benchmark(args.benchmark)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = harness.compare(args.benchmark, args.seeds, base, tuple(args.methods), str(out / "cells"), args.jobs)
    (out / "results.csv").write_text(harness.results_csv(results))
    print(harness.results_matrix(results))
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "eval": cmd_eval,
    "render": cmd_render,
    "compare": cmd_compare,
}


def run(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UnknownBenchmark) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolveFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DeepVekuaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
