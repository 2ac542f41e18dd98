from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from scipy.special import zeta

from prefattach import distributions


@distributions.register("powerlaw", "pl")
class PowerLaw(distributions.Family):
    """Power law ``x^-gamma``; the normalising sum is the Hurwitz zeta function."""

    name = "power_law"
    parameters = ("gamma",)
    bounds = ((1.0 + 1e-6, 50.0),)

    def log_density(self, x: np.ndarray, values: Sequence[float]) -> np.ndarray:
        (gamma,) = values
        return -gamma * np.log(np.asarray(x, dtype=np.float64))

    def log_normalizer(
        self, values: Sequence[float], k_min: int, k_max: int | None = None
    ) -> float:
        (gamma,) = values
        total = zeta(gamma, k_min)
        if k_max is not None:
            total -= zeta(gamma, k_max + 1)
        return math.log(total)

    def initial_guesses(self, x: np.ndarray, k_min: int) -> list[tuple[float, ...]]:
        x = np.asarray(x, dtype=np.float64)
        spread = float(np.log(x / (k_min - 0.5)).sum())
        gamma = 1.0 + x.size / spread if spread > 0 else 2.5
        lo, hi = self.bounds[0]
        return [(min(max(gamma, lo), hi),), (2.0,), (3.0,)]

    def tail_quantile(self, values: Sequence[float], start: float, u: np.ndarray) -> np.ndarray:
        (gamma,) = values
        q = (start - 0.5) * (1 - u) ** (-1 / (gamma - 1)) + 0.5
        return np.maximum(np.floor(q), start)
