from __future__ import annotations

import numpy as np
import pytest
from scipy.special import logsumexp

from prefattach import distributions
from prefattach.exceptions import ConfigurationError


def brute_force(name: str, values: tuple[float, ...], k_min: int, k_max: int) -> float:
    family = distributions.get(name)
    return float(logsumexp(family.log_density(np.arange(k_min, k_max + 1), values)))


@pytest.mark.parametrize(
    ("alias", "name"),
    [
        ("lognormal", "lognormal"),
        ("log_normal", "lognormal"),
        ("Log-Normal", "lognormal"),
        ("power_law", "power_law"),
        ("powerlaw", "power_law"),
        ("pl", "power_law"),
        ("exp", "exponential"),
    ],
)
def test_aliases(alias: str, name: str) -> None:
    assert distributions.get(alias).name == name


def test_unknown_family() -> None:
    with pytest.raises(ConfigurationError):
        distributions.get("weibull")


@pytest.mark.parametrize(
    ("name", "values", "k_min"),
    [
        ("power_law", (2.5,), 1),
        ("power_law", (3.2,), 7),
        ("exponential", (0.05,), 1),
        ("exponential", (1.3,), 12),
        ("lognormal", (1.0, 1.5), 1),
        ("lognormal", (0.2, 0.7), 4),
        ("lognormal", (8.0, 0.3), 1),
        ("lognormal", (6.0, 1.2), 30),
    ],
)
def test_infinite_normalizer(name: str, values: tuple[float, ...], k_min: int) -> None:
    family = distributions.get(name)
    expected = brute_force(name, values, k_min, 4_000_000)
    # the power law tail beyond the brute force range is still visible at this precision
    rel = 1e-6 if name == "power_law" else 1e-9
    assert family.log_normalizer(values, k_min) == pytest.approx(expected, rel=rel, abs=rel)


@pytest.mark.parametrize(
    ("name", "values", "k_min", "k_max"),
    [
        ("power_law", (2.1,), 1, 50),
        ("exponential", (0.2,), 3, 40),
        ("lognormal", (2.0, 1.0), 2, 5000),
    ],
)
def test_finite_normalizer(name: str, values: tuple[float, ...], k_min: int, k_max: int) -> None:
    family = distributions.get(name)
    expected = brute_force(name, values, k_min, k_max)
    assert family.log_normalizer(values, k_min, k_max) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize(
    ("name", "inside", "outside"),
    [
        ("power_law", (2.0,), (1.0,)),
        ("exponential", (0.1,), (0.0,)),
        ("lognormal", (0.0, 1.0), (0.0, 0.0)),
    ],
)
def test_in_bounds(name: str, inside: tuple[float, ...], outside: tuple[float, ...]) -> None:
    family = distributions.get(name)
    assert family.in_bounds(inside)
    assert not family.in_bounds(outside)


@pytest.mark.parametrize(
    ("name", "values"),
    [("power_law", (2.5,)), ("exponential", (0.3,)), ("lognormal", (1.0, 0.8))],
)
def test_tail_quantile_is_monotone(name: str, values: tuple[float, ...]) -> None:
    family = distributions.get(name)
    u = np.linspace(0.0, 0.999, 50)
    q = family.tail_quantile(values, 100.0, u)
    assert np.all(q >= 100)
    assert np.all(np.diff(q) >= 0)


@pytest.mark.parametrize("name", ["power_law", "exponential", "lognormal"])
def test_initial_guesses_are_in_bounds(name: str) -> None:
    family = distributions.get(name)
    x = np.array([1, 1, 2, 3, 5, 8, 13, 40])
    guesses = family.initial_guesses(x, 1)
    assert guesses
    assert all(len(guess) == len(family.parameters) for guess in guesses)
