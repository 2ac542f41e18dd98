"""Discretised candidate families for in-degree distributions.

Every family is given by a continuous density f evaluated at ``x = k + 1`` so that nodes with
zero in-degree are part of the support. The probability mass of ``x`` on the support
``k_min <= x <= k_max`` is ``f(x) / sum_y f(y)``; each family supplies the logarithm of that
normalising sum.
"""

from __future__ import annotations

import abc
from collections.abc import Callable
from collections.abc import Sequence
from importlib import import_module
from pathlib import Path
from typing import ClassVar

import numpy as np

from prefattach.exceptions import ConfigurationError


class Family(metaclass=abc.ABCMeta):
    name: ClassVar[str]
    parameters: ClassVar[tuple[str, ...]]
    bounds: ClassVar[tuple[tuple[float, float], ...]]

    @abc.abstractmethod
    def log_density(self, x: np.ndarray, values: Sequence[float]) -> np.ndarray:
        """Logarithm of the unnormalised density at ``x = k + 1``."""

    @abc.abstractmethod
    def log_normalizer(
        self, values: Sequence[float], k_min: int, k_max: int | None = None
    ) -> float:
        """Logarithm of ``sum_{x=k_min}^{k_max} f(x)``."""

    @abc.abstractmethod
    def initial_guesses(self, x: np.ndarray, k_min: int) -> list[tuple[float, ...]]:
        """Starting points for the likelihood search, the first one moment based."""

    @abc.abstractmethod
    def tail_quantile(self, values: Sequence[float], start: float, u: np.ndarray) -> np.ndarray:
        """Continuous approximation of the quantiles of ``x`` conditional on ``x >= start``."""

    def in_bounds(self, values: Sequence[float]) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(values, self.bounds))

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}>"


families: dict[str, Family] = {}


def register(*aliases: str) -> Callable[[type[Family]], type[Family]]:
    def wrapper(family_cls: type[Family]) -> type[Family]:
        instance = family_cls()
        for key in (family_cls.name, *aliases):
            families[key] = instance
        return family_cls

    return wrapper


def get(name: str) -> Family:
    """Look up a family by name or alias.

    Examples:

        >>> get("lognormal").parameters
        ('mu', 'sigma')
        >>> get("power_law").name
        'power_law'
    """
    try:
        return families[name.strip().lower().replace("-", "_")]
    except KeyError as e:
        raise ConfigurationError(
            f"Unknown distribution family '{name}', expected one of {sorted(families)}"
        ) from e


this = Path(__file__)
for path in this.parent.glob("*.py"):
    if path == this:
        continue
    import_module(f"prefattach.distributions.{path.stem}")
