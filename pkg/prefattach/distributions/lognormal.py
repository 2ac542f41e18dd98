from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from prefattach import distributions


DIRECT_TERMS = 1024

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


@distributions.register("log_normal")
class LogNormal(distributions.Family):
    """Log-normal density ``exp(-(ln x - mu)^2 / (2 sigma^2)) / (x sigma sqrt(2 pi))``."""

    name = "lognormal"
    parameters = ("mu", "sigma")
    bounds = ((-50.0, 50.0), (1e-3, 50.0))

    def log_density(self, x: np.ndarray, values: Sequence[float]) -> np.ndarray:
        mu, sigma = values
        log_x = np.log(np.asarray(x, dtype=np.float64))
        return -log_x - math.log(sigma) - _LOG_SQRT_2PI - (log_x - mu) ** 2 / (2 * sigma**2)

    def log_normalizer(
        self, values: Sequence[float], k_min: int, k_max: int | None = None
    ) -> float:
        if k_max is not None:
            return float(logsumexp(self.log_density(np.arange(k_min, k_max + 1), values)))
        mu, sigma = values
        end = k_min + DIRECT_TERMS
        head = float(logsumexp(self.log_density(np.arange(k_min, end), values)))
        # midpoint rule for the terms x >= end plus its leading correction
        b = end - 0.5
        z = (math.log(b) - mu) / sigma
        log_integral = float(norm.logsf(z))
        log_fb = float(self.log_density(np.array([b]), values)[0])
        ratio = -math.exp(log_fb - log_integral) * (1 + z / sigma) / (24 * b)
        if math.isfinite(ratio) and ratio > -1:
            log_integral += math.log1p(ratio)
        return float(np.logaddexp(head, log_integral))

    def initial_guesses(self, x: np.ndarray, k_min: int) -> list[tuple[float, ...]]:
        log_x = np.log(np.asarray(x, dtype=np.float64))
        mu, sigma = float(log_x.mean()), max(float(log_x.std()), 0.05)
        return [(mu, sigma), (mu - sigma, 1.5 * sigma), (mu - 2 * sigma, 2 * sigma), (0.0, 1.0)]

    def tail_quantile(self, values: Sequence[float], start: float, u: np.ndarray) -> np.ndarray:
        mu, sigma = values
        survival = norm.sf((math.log(start - 0.5) - mu) / sigma)
        q = np.exp(mu + sigma * norm.isf((1 - u) * survival))
        return np.maximum(np.rint(q), start)
