from __future__ import annotations

import json

import pytest

from prefattach import netsim
from prefattach import timeline
from prefattach.domain import GrowthMode
from prefattach.domain import ResolutionKind
from prefattach.exceptions import ConfigurationError
from prefattach.netsim import ModelConfig


def test_simulation_is_reproducible() -> None:
    config = ModelConfig(attachment="log_linear", parameter=0.8, T=300, rng_seed=99)
    first = netsim.simulate(config)
    second = netsim.simulate(config)
    assert first.steps == second.steps
    other = netsim.simulate(ModelConfig(attachment="log_linear", parameter=0.8, T=300, rng_seed=98))
    assert other.steps != first.steps


def test_price_mode() -> None:
    config = ModelConfig(T=200, edges_per_step={"m": 3}, rng_seed=1)
    seq = netsim.simulate(config)
    assert seq.T == 200
    assert seq.resolution.kind is ResolutionKind.MAXIMAL
    assert all(step.n == 1 for step in seq)
    assert all(step.m == 3 for step in seq.steps[1:])
    assert seq.total_edges == 3 * 199
    seq.validate()
    assert timeline.final_histogram(seq).total_degree == 3 * 199


def test_uniform_edges_per_step() -> None:
    config = ModelConfig(T=500, edges_per_step={"kind": "uniform", "m": 3}, rng_seed=5)
    m = [step.m for step in netsim.simulate(config).steps[1:]]
    assert min(m) >= 1
    assert max(m) <= 5
    assert len(set(m)) > 1
    assert config.edges_per_step.mean == 3.0


def test_jeong_mode() -> None:
    config = ModelConfig.preset(
        "jeong", T=2, n1=50, m1_prime=120, n2=20, edges_per_step={"m": 40}, rng_seed=4
    )
    assert config.mode is GrowthMode.JEONG
    seq = netsim.simulate(config)
    assert seq.T == 2
    assert seq.resolution.kind is ResolutionKind.BI_EPOCHAL
    assert (seq[1].n, seq[1].m_intra) == (50, 120)
    assert (seq[2].n, seq[2].m) == (20, 40)
    seq.validate()


def test_initial_in_degrees() -> None:
    config = ModelConfig(T=1, n1=3, m1_prime=3, initial_in_degrees=(2, 0, 1))
    seq = netsim.simulate(config)
    assert timeline.final_histogram(seq).counts == {0: 1, 1: 1, 2: 1}
    state = timeline.DegreeState()
    state.apply(seq[1])
    assert [state.degree[node] for node in seq[1].new_nodes] == [2, 0, 1]
    assert all(source != target for source, target in seq[1].intra_edges)


def test_log_linear_with_unit_exponent_is_linear() -> None:
    linear = netsim.simulate(ModelConfig(T=2000, edges_per_step={"m": 2}, rng_seed=31))
    log_linear = netsim.simulate(
        ModelConfig(
            attachment="log_linear", parameter=1.0, T=2000, edges_per_step={"m": 2}, rng_seed=31
        )
    )
    assert log_linear.steps == linear.steps


@pytest.mark.slow
def test_jeong_class_probabilities() -> None:
    # degrees {0, 0, 1} under A(k) = k + 1 give both classes weight 2
    hits = 0
    replicates = 100_000
    for seed in range(replicates):
        config = ModelConfig.preset(
            "jeong", T=2, n1=3, m1_prime=1, initial_in_degrees=(0, 0, 1), rng_seed=seed
        )
        ((_, target),) = netsim.simulate(config)[2].cross_edges
        hits += target == 2
    assert hits / replicates == pytest.approx(0.5, abs=0.01)


@pytest.mark.parametrize(
    "data",
    [
        {"T": 0},
        {"T": 3, "mode": "jeong"},
        {"T": 10, "attachment": "superlinear"},
        {"T": 10, "attachment": "log_linear"},
        {"T": 10, "attachment": "linear", "parameter": 1.0},
        {"T": 10, "n1": 2, "m1_prime": 1, "initial_in_degrees": [2, 0]},
        {"T": 10, "n1": 1, "m1_prime": 2},
        {"T": 10, "edges_per_step": {"kind": "poisson"}},
        {"T": 10, "rng_seed": -1},
        {"T": 10, "unknown": 1},
    ],
)
def test_invalid_configuration(data: dict) -> None:
    with pytest.raises(ConfigurationError):
        ModelConfig(**data)
    with pytest.raises(ConfigurationError):
        ModelConfig.from_json(json.dumps(data))


def test_from_json() -> None:
    config = ModelConfig.from_json('{"attachment": "nonlinear", "parameter": 2.0, "T": 10}')
    assert config.function == ModelConfig.preset("redner", parameter=2.0, T=10).function
    with pytest.raises(ConfigurationError):
        ModelConfig.from_json("{not json")


@pytest.mark.parametrize(
    ("name", "attachment", "parameter"),
    [
        ("price", "linear", None),
        ("callaway", "uniform", None),
        ("krapivsky", "log_linear", 1.0),
        ("redner", "nonlinear", 1.0),
    ],
)
def test_presets(name: str, attachment: str, parameter: float | None) -> None:
    config = ModelConfig.preset(name, T=10)
    assert config.attachment == attachment
    assert config.parameter == parameter
    assert config.mode is GrowthMode.PRICE


def test_unknown_preset() -> None:
    with pytest.raises(ConfigurationError):
        ModelConfig.preset("barabasi", T=10)


def test_price_compliance_of_a_simulation() -> None:
    seq = netsim.simulate(ModelConfig(T=2000, edges_per_step={"m": 2}, rng_seed=8))
    report = netsim.check_price_compliance(seq)
    assert report.price_compliant
    assert report.failures == []
    summary = report.to_json()
    assert summary["price_compliant"] is True
    assert [check["constraint"] for check in summary["checks"]] == [
        "initial_size",
        "single_node_growth",
        "stationary_edges",
    ]
    # one node per step, no calendar dates: the node count does not grow
    assert summary["doubling_time"] is None


def test_price_compliance_failures() -> None:
    config = ModelConfig.preset("jeong", T=2, n1=10, n2=5, edges_per_step={"m": 5})
    report = netsim.check_price_compliance(netsim.simulate(config))
    assert not report.price_compliant
    failed = {check.constraint for check in report.failures}
    assert failed == {"initial_size", "single_node_growth", "stationary_edges"}
    stationarity = report.checks[2]
    assert stationarity.observed["reason"] == "too few time-steps"
