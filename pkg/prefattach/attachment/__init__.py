"""Attachment functions A(k) of the growing network models.

Each module in this package defines one family and registers it under its canonical name plus
optional aliases. Families with a shape parameter expose it through :attr:`parameter` together
with the search interval used when the family is fitted to a measured attachment rate.
"""

from __future__ import annotations

import abc
from collections.abc import Callable
from importlib import import_module
from pathlib import Path
from typing import Any
from typing import ClassVar

import numpy as np

from prefattach.exceptions import ConfigurationError


class AttachmentFunction(metaclass=abc.ABCMeta):
    name: ClassVar[str]
    parameter: ClassVar[str | None] = None
    bounds: ClassVar[tuple[float, float] | None] = None

    def __init__(self, value: float | None = None) -> None:
        if self.parameter is None and value is not None:
            raise ConfigurationError(f"Attachment function '{self.name}' takes no parameter")
        if self.parameter is not None:
            if value is None:
                raise ConfigurationError(
                    f"Attachment function '{self.name}' requires the parameter '{self.parameter}'"
                )
            value = float(value)
            if not np.isfinite(value):
                raise ConfigurationError(f"Invalid {self.parameter} for '{self.name}': {value}")
        self.value = value
        self.validate()

    def validate(self) -> None:
        pass

    @abc.abstractmethod
    def __call__(self, k: int) -> float:
        """Evaluate A(k) for a single in-degree."""

    @abc.abstractmethod
    def evaluate(self, k: np.ndarray) -> np.ndarray:
        """Evaluate A(k) element-wise."""

    def log_evaluate(self, k: np.ndarray) -> np.ndarray:
        return np.log(self.evaluate(k))

    def with_value(self, value: float | None) -> AttachmentFunction:
        return type(self)(value)

    def describe(self) -> dict[str, Any]:
        description: dict[str, Any] = {"form": self.name}
        if self.parameter is not None:
            description[self.parameter] = self.value
        return description

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttachmentFunction):
            return NotImplemented
        return self.name == other.name and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.name, self.value))

    def __repr__(self) -> str:
        if self.parameter is None:
            return f"<{self.__class__.__name__}>"
        return f"<{self.__class__.__name__} {self.parameter}={self.value!r}>"


functions: dict[str, type[AttachmentFunction]] = {}


def register(*aliases: str) -> Callable[[type[AttachmentFunction]], type[AttachmentFunction]]:
    def wrapper(function_cls: type[AttachmentFunction]) -> type[AttachmentFunction]:
        for key in (function_cls.name, *aliases):
            functions[key] = function_cls
        return function_cls

    return wrapper


def create(name: str, value: float | None = None) -> AttachmentFunction:
    """Instantiate a registered attachment function by name.

    Examples:

        >>> create("log_linear", 0.5)
        <LogLinear alpha=0.5>
        >>> create("linear")(3)
        4.0
    """
    try:
        function_cls = functions[name]
    except KeyError as e:
        raise ConfigurationError(
            f"Unknown attachment function '{name}', expected one of {sorted(functions)}"
        ) from e
    return function_cls(value)


this = Path(__file__)
for path in this.parent.glob("*.py"):
    if path == this:
        continue
    import_module(f"prefattach.attachment.{path.stem}")
