"""Simulation of growing network models and the Price structural constraint checks.

At every time-step ``t > 1`` the new node cites ``m_t`` existing nodes. Each target is drawn
independently from G_{t-1}: first a degree class ``k`` with probability proportional to
``n_{t-1}(k) * A(k)``, then a uniform member of that class. Multi-edges are permitted.

Randomness
    All randomness flows from ``ModelConfig.rng_seed`` through :class:`numpy.random.SeedSequence`,
    which is spawned into three independent PCG64 streams: the edge counts ``m_t``, the placement of
    the initial network's internal edges and the target draws. Target draws consume two uniform
    variates each, in step order, from blocks of :data:`UNIFORM_BLOCK` values. A given seed yields
    the same sequence on every platform.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any
from typing import Literal
from typing import Optional
from typing import Tuple

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import ValidationError
from pydantic import model_validator

from prefattach import attachment
from prefattach import registry
from prefattach import timeline
from prefattach.domain import GrowthMode
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import ShapeError
from prefattach.sampler import DegreeClassSampler
from prefattach.timeline import GrowthSequence
from prefattach.timeline import Resolution
from prefattach.timeline import StepDelta


try:
    from typing import Self
except ImportError:
    from typing_extensions import Self


logger = logging.getLogger(__name__)

UNIFORM_BLOCK = 4096
RULE_OF_THUMB_FACTOR = 1000


class EdgesPerStep(BaseModel):
    """Distribution of the number of edges ``m_t`` added at each time-step.

    ``constant`` always adds ``m`` edges, ``uniform`` draws from ``{1, ..., 2m - 1}`` which has
    mean ``m`` and finite variance.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["constant", "uniform"] = "constant"
    m: int = Field(default=1, ge=1)

    @property
    def mean(self) -> float:
        return float(self.m)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "constant":
            return np.full(size, self.m, dtype=np.int64)
        return rng.integers(1, 2 * self.m, size=size, dtype=np.int64)


class ModelConfig(BaseModel):
    """Configuration of a single simulation run.

    Args:
        attachment (str): Name of a registered attachment function, see
            :mod:`prefattach.attachment`.
        parameter (float | None): The shape parameter (alpha or beta) if the function has one.
        T (int): Total number of time-steps, including the initial network.
        n1 (int): Number of nodes of the initial network G_1.
        m1_prime (int): Number of edges inside G_1.
        initial_in_degrees (tuple[int, ...] | None): Exact in-degrees of the G_1 nodes. Determines
            ``n1`` and ``m1_prime``; otherwise ``m1_prime`` edges are placed at random.
        edges_per_step (EdgesPerStep): Distribution of ``m_t``.
        mode (GrowthMode): ``price`` adds one node per step, ``jeong`` adds ``n2`` nodes in a
            single second step.
        n2 (int): Number of new nodes in the second step of the Jeong mode.
        rng_seed (int): Seed of all randomness, a 64-bit unsigned integer.

    Raises:
        ConfigurationError: If the configuration is invalid.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    attachment: str = "linear"
    parameter: Optional[float] = None  # noqa: UP007
    T: int = Field(ge=1)  # noqa: N815
    n1: int = Field(default=1, ge=1)
    m1_prime: int = Field(default=0, ge=0)
    initial_in_degrees: Optional[Tuple[int, ...]] = None  # noqa: UP006, UP007
    edges_per_step: EdgesPerStep = EdgesPerStep()
    mode: GrowthMode = GrowthMode.PRICE
    n2: int = Field(default=1, ge=1)
    rng_seed: int = Field(default=0, ge=0, lt=2**64)

    def __init__(self, **data: Any) -> None:
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise ConfigurationError(str(e)) from e

    @model_validator(mode="after")
    def _check_consistency(self) -> Self:
        if self.attachment not in attachment.functions:
            raise ValueError(f"unknown attachment function '{self.attachment}'")
        attachment.create(self.attachment, self.parameter)
        if self.mode is GrowthMode.JEONG and self.T != 2:
            raise ValueError(f"the Jeong mode needs exactly T=2 steps, got T={self.T}")
        if self.initial_in_degrees is not None:
            degrees = self.initial_in_degrees
            if len(degrees) != self.n1 or sum(degrees) != self.m1_prime:
                raise ValueError(
                    "initial_in_degrees must have n1 entries summing to m1_prime, "
                    f"got {len(degrees)} entries summing to {sum(degrees)}"
                )
            if any(k < 0 for k in degrees):
                raise ValueError("initial in-degrees must not be negative")
        if self.n1 == 1 and self.m1_prime > 0:
            raise ValueError("a single initial node cannot hold internal edges without self-loops")
        return self

    @classmethod
    def from_json(cls, document: str | bytes | dict[str, Any]) -> Self:
        try:
            data = json.loads(document) if isinstance(document, (str, bytes)) else document
            return cls.model_validate(data)
        except (ValidationError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Invalid model configuration: {e}") from e

    @classmethod
    def preset(cls, name: str, **overrides: Any) -> Self:
        """Create a configuration for one of the registered growing network models.

        Examples:

            >>> ModelConfig.preset("redner", T=10).function
            <Nonlinear beta=1.0>
        """
        try:
            entry = registry.model(name)
        except KeyError as e:
            raise ConfigurationError(str(e)) from e
        data: dict[str, Any] = {
            "attachment": entry["attachment"],
            "parameter": entry["default"],
            "mode": entry["mode"],
        }
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**data)

    @property
    def function(self) -> attachment.AttachmentFunction:
        return attachment.create(self.attachment, self.parameter)


def _uniforms(rng: np.random.Generator) -> Iterator[float]:
    while True:
        yield from rng.random(UNIFORM_BLOCK).tolist()


def _initial_edges(config: ModelConfig, rng: np.random.Generator) -> list[tuple[int, int]]:
    n1 = config.n1
    if config.initial_in_degrees is not None:
        edges = []
        source = 0
        for target, degree in enumerate(config.initial_in_degrees):
            for _ in range(degree):
                if source == target:
                    source = (source + 1) % n1
                edges.append((source, target))
                source = (source + 1) % n1
        return edges
    edges = []
    for _ in range(config.m1_prime):
        source = int(rng.integers(n1))
        target = int(rng.integers(n1 - 1))
        edges.append((source, target + (target >= source)))
    return edges


def simulate(config: ModelConfig) -> GrowthSequence:
    """Generate a growth sequence from a growing network model.

    Examples:

        >>> seq = simulate(ModelConfig(attachment="linear", T=5, rng_seed=7))
        >>> [step.n for step in seq]
        [1, 1, 1, 1, 1]
        >>> [step.m for step in seq]
        [0, 1, 1, 1, 1]
    """
    function = config.function
    count_seed, setup_seed, target_seed = np.random.SeedSequence(config.rng_seed).spawn(3)
    count_rng = np.random.Generator(np.random.PCG64(count_seed))
    setup_rng = np.random.Generator(np.random.PCG64(setup_seed))
    uniforms = _uniforms(np.random.Generator(np.random.PCG64(target_seed)))

    sampler = DegreeClassSampler(function)
    initial_nodes = tuple(sampler.add_node() for _ in range(config.n1))
    initial_edges = _initial_edges(config, setup_rng)
    for _, target in initial_edges:
        sampler.increment(target)
    steps = [StepDelta(1, initial_nodes, (), tuple(initial_edges))]

    counts = config.edges_per_step.draw(count_rng, config.T - 1).tolist()
    if config.mode is GrowthMode.JEONG:
        targets = [sampler.sample(next(uniforms), next(uniforms)) for _ in range(counts[0])]
        new_nodes = tuple(sampler.add_node() for _ in range(config.n2))
        cross = tuple((new_nodes[i % config.n2], target) for i, target in enumerate(targets))
        for target in targets:
            sampler.increment(target)
        steps.append(StepDelta(2, new_nodes, cross))
        resolution = Resolution.bi_epochal()
    else:
        for t, m in enumerate(counts, start=2):
            targets = [sampler.sample(next(uniforms), next(uniforms)) for _ in range(m)]
            node = sampler.add_node()
            for target in targets:
                sampler.increment(target)
            steps.append(StepDelta(t, (node,), tuple((node, target) for target in targets)))
        resolution = Resolution.maximal()

    logger.info(
        "Simulated %d steps with %s attachment (%d nodes, %d edges)",
        config.T,
        function.name,
        len(sampler),
        sum(sampler.degree),
    )
    return GrowthSequence(tuple(steps), resolution)


@dataclass(frozen=True)
class ConstraintCheck:
    constraint: str
    description: str
    passed: bool
    observed: Any = None

    def to_json(self) -> dict[str, Any]:
        return {
            "constraint": self.constraint,
            "description": self.description,
            "passed": self.passed,
            "observed": self.observed,
        }


@dataclass(frozen=True)
class StructuralComplianceReport:
    """Outcome of the structural Price-model conditions for a growth sequence.

    The fourth condition, linear attachment, is left to :mod:`prefattach.affit`; its slot
    :attr:`attachment_form` is only filled in by callers that ran an attachment fit.
    """

    checks: tuple[ConstraintCheck, ...]
    doubling_time: float | None = None
    attachment_form: str | None = None

    @property
    def price_compliant(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[ConstraintCheck]:
        return [check for check in self.checks if not check.passed]

    def to_json(self) -> dict[str, Any]:
        doubling = self.doubling_time
        return {
            "price_compliant": self.price_compliant,
            "checks": [check.to_json() for check in self.checks],
            "failures": [check.to_json() for check in self.failures],
            "doubling_time": doubling if doubling is not None and math.isfinite(doubling) else None,
            "attachment_form": self.attachment_form,
        }


def _initial_size_check(seq: GrowthSequence) -> ConstraintCheck:
    n1 = seq.steps[0].n
    total = seq.total_nodes
    threshold = RULE_OF_THUMB_FACTOR * math.sqrt(n1)
    return ConstraintCheck(
        "initial_size",
        f"final network size N >= {RULE_OF_THUMB_FACTOR} * sqrt(n1)",
        total >= threshold,
        {"N": total, "n1": n1, "threshold": threshold},
    )


def _single_node_check(seq: GrowthSequence) -> ConstraintCheck:
    violating = [step.n for step in seq.steps[1:] if step.n != 1]
    return ConstraintCheck(
        "single_node_growth",
        "exactly one new node per time-step t > 1",
        not violating,
        {"violating_steps": len(violating), "max_n_t": max(violating, default=1)},
    )


def _stationarity_check(seq: GrowthSequence) -> ConstraintCheck:
    description = "mean of m_t in the first and last decile agree within 2 pooled standard errors"
    m = np.array([step.m for step in seq.steps[1:]], dtype=np.float64)
    size = m.size // 10
    if size < 2:
        return ConstraintCheck(
            "stationary_edges",
            description,
            False,
            {"reason": "too few time-steps", "steps": m.size},
        )
    first, last = m[:size], m[-size:]
    difference = abs(float(first.mean() - last.mean()))
    error = math.sqrt(float(first.var(ddof=1) + last.var(ddof=1)) / size)
    passed = difference == 0.0 if error == 0.0 else difference <= 2 * error
    return ConstraintCheck(
        "stationary_edges",
        description,
        passed,
        {
            "first_decile_mean": float(first.mean()),
            "last_decile_mean": float(last.mean()),
            "pooled_standard_error": error,
        },
    )


def check_price_compliance(seq: GrowthSequence) -> StructuralComplianceReport:
    """Evaluate the structural conditions of Price's model.

    The checks are the initial-size rule of thumb ``N >= 1000 * sqrt(n1)`` (a reported heuristic),
    single node growth and stationarity of ``m_t``. The doubling time of the per-period node count
    is reported alongside.
    """
    try:
        doubling = timeline.doubling_time(seq)
    except ShapeError:
        doubling = None
    report = StructuralComplianceReport(
        checks=(_initial_size_check(seq), _single_node_check(seq), _stationarity_check(seq)),
        doubling_time=doubling,
    )
    for failure in report.failures:
        logger.info("Price constraint %s failed: %s", failure.constraint, failure.observed)
    return report
