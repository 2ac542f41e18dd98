from __future__ import annotations

import math

import numpy as np

from prefattach import attachment
from prefattach.exceptions import ConfigurationError


@attachment.register("redner")
class Nonlinear(attachment.AttachmentFunction):
    """Nonlinear attachment A(k) = (k + 1) / (1 + beta * log(k + 1))."""

    name = "nonlinear"
    parameter = "beta"
    bounds = (0.0, 50.0)

    def validate(self) -> None:
        if self.beta < 0:
            raise ConfigurationError(f"beta must not be negative, got {self.beta}")

    @property
    def beta(self) -> float:
        assert self.value is not None
        return self.value

    def __call__(self, k: int) -> float:
        return (k + 1) / (1.0 + self.beta * math.log(k + 1))

    def evaluate(self, k: np.ndarray) -> np.ndarray:
        shifted = np.asarray(k, dtype=np.float64) + 1.0
        return shifted / (1.0 + self.beta * np.log(shifted))

    def log_evaluate(self, k: np.ndarray) -> np.ndarray:
        log_shifted = np.log1p(np.asarray(k, dtype=np.float64))
        return log_shifted - np.log1p(self.beta * log_shifted)
