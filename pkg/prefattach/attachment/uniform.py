from __future__ import annotations

import numpy as np

from prefattach import attachment


@attachment.register("callaway")
class Uniform(attachment.AttachmentFunction):
    """Every node attracts new edges equally, A(k) = 1."""

    name = "uniform"

    def __call__(self, k: int) -> float:
        return 1.0

    def evaluate(self, k: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(k, dtype=np.float64))
