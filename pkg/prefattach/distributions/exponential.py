from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from prefattach import distributions


@distributions.register("exp")
class Exponential(distributions.Family):
    """Exponential density ``lambda exp(-lambda x)``, a geometric law once discretised."""

    name = "exponential"
    parameters = ("lambda",)
    bounds = ((1e-8, 50.0),)

    def log_density(self, x: np.ndarray, values: Sequence[float]) -> np.ndarray:
        (rate,) = values
        return math.log(rate) - rate * np.asarray(x, dtype=np.float64)

    def log_normalizer(
        self, values: Sequence[float], k_min: int, k_max: int | None = None
    ) -> float:
        (rate,) = values
        total = math.log(rate) - rate * k_min - math.log(-math.expm1(-rate))
        if k_max is not None:
            total += math.log(-math.expm1(-rate * (k_max - k_min + 1)))
        return total

    def initial_guesses(self, x: np.ndarray, k_min: int) -> list[tuple[float, ...]]:
        excess = float(np.mean(x)) - k_min
        rate = math.log1p(1 / excess) if excess > 0 else 1.0
        return [(rate,), (rate / 2,), (rate * 2,)]

    def tail_quantile(self, values: Sequence[float], start: float, u: np.ndarray) -> np.ndarray:
        (rate,) = values
        return start + np.floor(-np.log1p(-u) / rate)
