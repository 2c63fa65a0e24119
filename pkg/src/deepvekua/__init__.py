"""DeepVekua: learned coordinate warps feeding a closed-form spectral solve."""

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    SolveFailed,
    UnknownBenchmark,
    UnsupportedDimension,
)
from .fields import EvalGrid, SampleSet, generate, mse_on_grid
from .model import ModelParams, SolvedWeights, forward_train, init_model, loss_and_grad, predict
from .training import Checkpoint, TrainConfig, train

__version__ = "0.1.0"
