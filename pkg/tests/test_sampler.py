from __future__ import annotations

import numpy as np
import pytest

from prefattach import attachment
from prefattach.sampler import ClassPool
from prefattach.sampler import DegreeClassSampler
from prefattach.sampler import FenwickTree


def test_fenwick_tree() -> None:
    values = [0.5, 0.0, 2.0, 1.5, 0.0, 3.0]
    tree = FenwickTree.from_values(values)
    assert tree.total == pytest.approx(7.0)
    assert [tree.prefix(i) for i in range(len(values) + 1)] == pytest.approx(
        [0.0, 0.5, 0.5, 2.5, 4.0, 4.0, 7.0]
    )
    assert tree.find(0.0) == 0
    assert tree.find(0.5) == 2
    assert tree.find(2.49) == 2
    assert tree.find(2.5) == 3
    assert tree.find(6.99) == 5
    tree.add(1, 1.0)
    assert tree.find(0.5) == 1
    assert tree.total == pytest.approx(8.0)


def test_class_pool() -> None:
    pool = ClassPool()
    for node in range(5):
        pool.add(node)
    pool.remove(1)
    pool.remove(4)
    assert sorted(pool) == [0, 2, 3]
    assert len(pool) == 3
    assert 1 not in pool
    assert {pool[i] for i in range(len(pool))} == {0, 2, 3}


def test_running_total_matches_recomputation() -> None:
    sampler = DegreeClassSampler(attachment.create("nonlinear", 0.7), rebuild_every=37)
    rng = np.random.default_rng(3)
    for _ in range(200):
        sampler.add_node()
        for _ in range(3):
            sampler.increment(sampler.sample(rng.random(), rng.random()))
        total, weights = sampler.recompute()
        assert sampler.total == pytest.approx(total, rel=1e-12)
        assert sampler.weights == pytest.approx(weights, rel=1e-12)
    assert sum(sampler.counts.values()) == len(sampler) == 200
    assert sum(k * n for k, n in sampler.counts.items()) == 600


def test_members_sit_in_their_degree_class() -> None:
    sampler = DegreeClassSampler(attachment.create("linear"))
    nodes = [sampler.add_node() for _ in range(4)]
    sampler.increment(nodes[2])
    sampler.increment(nodes[2])
    sampler.increment(nodes[3])
    assert [sampler.class_of(node) for node in nodes] == [0, 0, 2, 1]
    assert sampler.counts == {0: 2, 1: 1, 2: 1}
    assert sampler.probabilities() == pytest.approx({0: 2 / 7, 1: 2 / 7, 2: 3 / 7})


def test_sampling_frequencies_follow_class_weights() -> None:
    sampler = DegreeClassSampler(attachment.create("linear"))
    nodes = [sampler.add_node() for _ in range(3)]
    for _ in range(4):
        sampler.increment(nodes[0])
    rng = np.random.default_rng(11)
    draws = np.array([sampler.sample(rng.random(), rng.random()) for _ in range(20_000)])
    # A(4) = 5 against A(0) = 1 for the two other nodes
    assert np.mean(draws == nodes[0]) == pytest.approx(5 / 7, abs=0.02)


def test_sample_from_empty_network() -> None:
    with pytest.raises(IndexError):
        DegreeClassSampler(attachment.create("uniform")).sample(0.5, 0.5)


def test_growing_beyond_initial_capacity() -> None:
    sampler = DegreeClassSampler(attachment.create("log_linear", 1.2))
    node = sampler.add_node()
    for _ in range(500):
        sampler.increment(node)
    assert sampler.counts == {500: 1}
    assert sampler.sample(0.999999, 0.5) == node
    assert sampler.total == pytest.approx(501**1.2)


@pytest.mark.parametrize(("name", "value"), [("linear", None), ("nonlinear", 1.0)])
def test_per_node_frequencies_are_exact(name: str, value: float | None) -> None:
    function = attachment.create(name, value)
    sampler = DegreeClassSampler(function)
    degrees = [0, 0, 0, 1, 1, 2, 3, 5, 5, 8]
    for k in degrees:
        node = sampler.add_node()
        for _ in range(k):
            sampler.increment(node)
    weights = np.array([function(k) for k in degrees])
    expected = weights / weights.sum()

    draws = 100_000
    rng = np.random.default_rng(2718)
    u = rng.random((draws, 2))
    counts = np.bincount([sampler.sample(a, b) for a, b in u], minlength=len(degrees))
    observed = counts / draws
    standard_error = np.sqrt(expected * (1 - expected) / draws)
    assert np.all(np.abs(observed - expected) <= 3 * standard_error)
