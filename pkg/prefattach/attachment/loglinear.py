from __future__ import annotations

import numpy as np

from prefattach import attachment


@attachment.register("krapivsky")
class LogLinear(attachment.AttachmentFunction):
    """Log-linear attachment A(k) = (k + 1) ** alpha.

    ``alpha = 1`` reproduces :class:`~prefattach.attachment.linear.Linear` and ``alpha = 0``
    reproduces :class:`~prefattach.attachment.uniform.Uniform` exactly.
    """

    name = "log_linear"
    parameter = "alpha"
    bounds = (-2.0, 5.0)

    @property
    def alpha(self) -> float:
        assert self.value is not None
        return self.value

    def __call__(self, k: int) -> float:
        return float(k + 1) ** self.alpha

    def evaluate(self, k: np.ndarray) -> np.ndarray:
        return (np.asarray(k, dtype=np.float64) + 1.0) ** self.alpha

    def log_evaluate(self, k: np.ndarray) -> np.ndarray:
        return self.alpha * np.log1p(np.asarray(k, dtype=np.float64))
