"""Training configuration, the Adam training loop, and checkpoints."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, fields as dc_fields
from pathlib import Path

import numpy as np

from . import baselines, model
from .errors import ConfigError, SolveFailed
from .fields import SampleSet
from .optim import AdamState, adam_step
from .rng import substream
from .serialization import dumps_document, loads_document

FORMAT_VERSION = 1
INIT_STREAM = 2
METHODS = ("deepvekua", "siren", "gridmlp", "cascade")


@dataclass
class TrainConfig:
    benchmark: str = "warped_harmonic"
    method: str = "deepvekua"
    seed: int = 0
    iters: int = 2000
    lr: float = 2e-3
    lam: float = model.DEFAULT_LAMBDA
    blocks: int = 5
    freqs: int = 16
    hidden: int = 32
    n_train: int | None = None
    noise_sigma: float | None = None
    out: str = "."
    learn_freqs: bool = True
    learn_warp: bool = True
    timing: bool = False
    data: str | None = None

    # config-file key -> attribute, where they differ
    ALIASES = {"lambda": "lam", "output": "out", "K": "freqs", "L": "blocks", "H": "hidden"}

    def validate(self, strict: bool = True) -> "TrainConfig":
        """Check invariants; ``strict=False`` additionally admits ``lr = 0`` with ``iters > 0``."""
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        for name in ("blocks", "freqs", "hidden"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.iters < 0:
            raise ConfigError("iters must be non-negative")
        if self.n_train is not None and self.n_train < 1:
            raise ConfigError("n_train must be positive")
        if self.noise_sigma is not None and self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be non-negative")
        if self.lr < 0 or (strict and not (self.lr > 0 or self.iters == 0)):
            raise ConfigError("lr must be positive unless iters = 0")
        if not self.lam > 0:
            raise ConfigError("lambda must be positive")
        return self

    @classmethod
    def from_text(cls, text: str) -> "TrainConfig":
        """Parse ``key = value`` lines; ``#`` starts a comment."""
        types = {f.name: f.type for f in dc_fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            key = cls.ALIASES.get(key, key)
            if key not in types:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            values[key] = _coerce(key, types[key], val, lineno)
        return cls(**values).validate()

    def to_dict(self) -> dict:
        """Config echo for checkpoints; the output directory is left out so the
        checkpoint does not depend on where it is written."""
        d = asdict(self)
        del d["out"]
        return d


def _coerce(key: str, typ: str, val: str, lineno: int):
    try:
        if val.lower() in ("none", "null", "") and "None" in typ:
            return None
        if typ.startswith("bool"):
            if val.lower() in ("1", "true", "yes", "on"):
                return True
            if val.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(val)
        if typ.startswith("int"):
            return int(val)
        if typ.startswith("float"):
            return float(val)
        return val
    except ValueError:
        raise ConfigError(f"line {lineno}: bad value {val!r} for {key}") from None


# -- coordinate normalization ------------------------------------------------

@dataclass
class Normalizer:
    """Affine map taking the box ``[lo, hi]`` onto [-1, 1]^d.

    The box is the sampling domain when the data comes with one, otherwise
    the bounding box of the training coordinates.
    """

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Normalizer":
        return cls(x.min(axis=0), x.max(axis=0))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        span = np.where(self.hi > self.lo, self.hi - self.lo, 2.0)
        center = 0.5 * (self.hi + self.lo)
        return 2.0 * (np.asarray(x, dtype=np.float64) - center) / span


# -- per-method adapters -------------------------------------------------------

class _Vekua:
    def __init__(self, cfg: TrainConfig, d: int, rng):
        static = cfg.method == "cascade"
        self.template = model.init_model(
            rng, d, blocks=cfg.blocks, k=cfg.freqs, hidden=cfg.hidden, lam=cfg.lam, static=static
        )
        self.mask = model.trainable_mask(self.template, cfg.learn_warp, cfg.learn_freqs)
        self.vector = model.flatten(self.template.blocks)
        self.solved: model.SolvedWeights | None = None

    def params(self, vec):
        return model.unflatten(self.template, vec)

    def loss_and_grad(self, vec, x, y):
        mse, grads, _ = model.loss_and_grad(self.params(vec), x, y)
        return mse, model.flatten(grads)

    def finalize(self, vec, x, y) -> float:
        m = self.params(vec)
        fwd = model.forward_train(m, x, y)
        self.solved = fwd.solved
        return model.mse_of(y - fwd.total_pred)


class _Baseline:
    def __init__(self, cfg: TrainConfig, d: int, rng):
        if cfg.method == "siren":
            self.template = baselines.siren_init(rng, d)
            self._lg = baselines.siren_loss_and_grad
        else:
            self.template = baselines.gridmlp_init(rng, d)
            self._lg = baselines.gridmlp_loss_and_grad
        self.vector = baselines.flatten(self.template)
        self.mask = None

    def params(self, vec):
        return baselines.unflatten(self.template, vec)

    def loss_and_grad(self, vec, x, y):
        mse, grads = self._lg(self.params(vec), x, y)
        return mse, baselines.flatten(grads)

    def finalize(self, vec, x, y) -> float:
        return self._lg(self.params(vec), x, y)[0]


# -- checkpoints -------------------------------------------------------------

@dataclass
class Checkpoint:
    method: str
    seed: int
    config: dict
    normalizer: Normalizer
    params: object  # model.ModelParams for vekua methods, dict of arrays for baselines
    solved: model.SolvedWeights | None = None
    format_version: int = FORMAT_VERSION

    @property
    def d(self) -> int:
        return len(self.normalizer.lo)

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Predictions at raw (unnormalized) coordinates."""
        xn = self.normalizer(x)
        if self.method in ("deepvekua", "cascade"):
            return model.predict(self.params, self.solved, xn)
        if self.method == "siren":
            return baselines.siren_forward(self.params, xn)
        return baselines.gridmlp_forward(self.params, xn)

    def to_document(self) -> dict:
        doc = {
            "format_version": self.format_version,
            "method": self.method,
            "seed": self.seed,
            "config": self.config,
            "normalization": {"lo": self.normalizer.lo, "hi": self.normalizer.hi},
        }
        if self.method in ("deepvekua", "cascade"):
            m: model.ModelParams = self.params
            doc["model"] = {
                "d": m.d,
                "lambda": m.lam,
                "blocks": [_block_doc(b) for b in m.blocks],
            }
            doc["solved"] = {
                "lambda_used": list(self.solved.lambda_used),
                "weights": [w for w in self.solved.weights],
            }
        else:
            doc["params"] = {k: {"shape": list(v.shape), "data": v.ravel()} for k, v in self.params.items()}
        return doc

    def dumps(self) -> str:
        return dumps_document(self.to_document())

    @classmethod
    def loads(cls, text: str) -> "Checkpoint":
        doc = loads_document(text)
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint format {doc.get('format_version')!r}")
        norm = Normalizer(_arr(doc["normalization"]["lo"]), _arr(doc["normalization"]["hi"]))
        method = doc["method"]
        solved = None
        if method in ("deepvekua", "cascade"):
            md = doc["model"]
            blocks = [_block_from_doc(b) for b in md["blocks"]]
            params = model.ModelParams(blocks, float(md["lambda"]), int(md["d"]))
            sd = doc["solved"]
            solved = model.SolvedWeights([_arr(w) for w in sd["weights"]], [float(v) for v in sd["lambda_used"]])
        else:
            params = {k: _arr(v["data"]).reshape(v["shape"]) for k, v in doc["params"].items()}
        return cls(method, int(doc["seed"]), doc["config"], norm, params, solved)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "Checkpoint":
        return cls.loads(Path(path).read_text())


def _arr(v) -> np.ndarray:
    return np.asarray(v, dtype=np.float64)


def _block_doc(b: model.BlockParams) -> dict:
    out = {}
    if b.warp is not None:
        out["w_in"] = b.warp.w_in
        out["b"] = b.warp.b
        out["w_out"] = b.warp.w_out
    out["freqs_re"] = b.freqs[:, 0]
    out["freqs_im"] = b.freqs[:, 1]
    return out


def _block_from_doc(doc: dict) -> model.BlockParams:
    warp = None
    if "w_in" in doc:
        warp = model.WarpParams(
            _arr(doc["w_in"]).reshape(len(doc["w_in"]), -1),
            _arr(doc["b"]),
            _arr(doc["w_out"]).reshape(-1, 2),
        )
    freqs = np.stack([_arr(doc["freqs_re"]), _arr(doc["freqs_im"])], axis=1)
    return model.BlockParams(warp, freqs)


# -- the loop ----------------------------------------------------------------

@dataclass
class MetricRow:
    iter: int
    train_mse: float
    wall_ms: float | None


class TrainingAborted(SolveFailed):
    def __init__(self, message: str, metrics: list[MetricRow]):
        super().__init__(message)
        self.metrics = metrics


def train(cfg: TrainConfig, data: SampleSet) -> tuple[Checkpoint, list[MetricRow]]:
    """Full-batch Adam on the training MSE.

    Row ``t`` of the metrics holds the loss at the parameters reached after
    ``t`` updates; the last row (``t = iters``) comes from the final solve that
    also fixes the stored spectral weights.
    """
    cfg.validate(strict=False)
    norm = Normalizer(*data.bounds) if data.bounds is not None else Normalizer.fit(data.x)
    x = norm(data.x)
    y = np.asarray(data.y, dtype=np.float64)
    rng = substream(cfg.seed, INIT_STREAM)
    adapter = _Vekua(cfg, data.d, rng) if cfg.method in ("deepvekua", "cascade") else _Baseline(cfg, data.d, rng)

    vec = adapter.vector.copy()
    state = AdamState.zeros(vec.size, lr=cfg.lr)
    metrics: list[MetricRow] = []
    start = time.perf_counter()

    def wall():
        return (time.perf_counter() - start) * 1e3 if cfg.timing else None

    try:
        for it in range(cfg.iters):
            mse, grad = adapter.loss_and_grad(vec, x, y)
            if adapter.mask is not None:
                grad = np.where(adapter.mask, grad, 0.0)
            state, vec = adam_step(state, vec, grad)
            metrics.append(MetricRow(it, mse, wall()))
        final_mse = adapter.finalize(vec, x, y)
    except SolveFailed as exc:
        raise TrainingAborted(f"{exc} (after {len(metrics)} iterations)", metrics) from exc
    metrics.append(MetricRow(cfg.iters, final_mse, wall()))

    ckpt = Checkpoint(
        cfg.method,
        cfg.seed,
        cfg.to_dict(),
        norm,
        adapter.params(vec),
        getattr(adapter, "solved", None),
    )
    return ckpt, metrics


def write_metrics(path, metrics: list[MetricRow]) -> None:
    lines = ["iter,train_mse,wall_ms"]
    for row in metrics:
        wall = "" if row.wall_ms is None else f"{row.wall_ms:.3f}"
        lines.append(f"{row.iter},{format(row.train_mse, '.17g')},{wall}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_metrics(path) -> list[MetricRow]:
    rows = []
    for line in Path(path).read_text().splitlines()[1:]:
        it, mse, wall = line.split(",")
        rows.append(MetricRow(int(it), float(mse), float(wall) if wall else None))
    return rows
