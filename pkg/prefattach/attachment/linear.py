from __future__ import annotations

import numpy as np

from prefattach import attachment


@attachment.register("price")
class Linear(attachment.AttachmentFunction):
    """Linear attachment with unit initial attractiveness, A(k) = k + 1."""

    name = "linear"

    def __call__(self, k: int) -> float:
        return float(k + 1)

    def evaluate(self, k: np.ndarray) -> np.ndarray:
        return np.asarray(k, dtype=np.float64) + 1.0
