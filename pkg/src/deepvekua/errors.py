"""Exception types shared across the package."""


class DeepVekuaError(Exception):
    pass


class DimensionMismatch(DeepVekuaError, ValueError):
    pass


class UnsupportedDimension(DeepVekuaError, ValueError):
    pass


class UnknownBenchmark(DeepVekuaError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown benchmark"


class NotPositiveDefinite(DeepVekuaError, ArithmeticError):
    """Raised by :func:`deepvekua.linalg.cholesky` when a pivot is not positive."""

    def __init__(self, pivot_index: int, pivot: float = float("nan")):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(f"non-positive pivot {pivot!r} at index {pivot_index}")


class SolveFailed(DeepVekuaError, ArithmeticError):
    pass


class ConfigError(DeepVekuaError, ValueError):
    pass
