from __future__ import annotations

import io
import math

import pytest

from prefattach import timeline
from prefattach.domain import ResolutionKind
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import ShapeError
from prefattach.exceptions import StepOutOfRange
from prefattach.ingest import CitationCorpus
from prefattach.ingest import parse_corpus
from prefattach.timeline import GrowthSequence
from prefattach.timeline import Resolution
from prefattach.timeline import StepDelta


NODES = b"""id,date
A,1990-01-01
B,1990-01-01
C,1990-02-10
D,1991-05-05
E,1991-05-05
"""

EDGES = b"""citing_id,cited_id
B,A
C,A
C,B
D,C
E,D
A,C
"""


@pytest.fixture
def corpus() -> CitationCorpus:
    return parse_corpus(io.BytesIO(NODES), io.BytesIO(EDGES))


def edge_counts(seq: GrowthSequence) -> list[tuple[int, int, int]]:
    return [(step.n, step.m, step.m_intra) for step in seq]


def test_maximal_sequence(corpus: CitationCorpus) -> None:
    seq = timeline.build_sequence(corpus, Resolution.maximal())
    assert seq.T == 5
    assert [step.new_nodes for step in seq] == [("A",), ("B",), ("C",), ("D",), ("E",)]
    assert edge_counts(seq) == [(1, 0, 0), (1, 1, 0), (1, 2, 0), (1, 1, 0), (1, 1, 0)]
    assert seq.excluded == 1
    assert seq.out_of_scope == 0
    seq.validate()


@pytest.mark.parametrize("resolution", [Resolution.daily(), Resolution.monthly()])
def test_daily_and_monthly_sequences(corpus: CitationCorpus, resolution: Resolution) -> None:
    seq = timeline.build_sequence(corpus, resolution)
    assert edge_counts(seq) == [(2, 0, 1), (1, 2, 0), (2, 1, 1)]
    assert seq.steps[0].intra_edges == (("B", "A"),)
    assert seq.excluded == 1


def test_yearly_sequence_keeps_same_year_citations(corpus: CitationCorpus) -> None:
    seq = timeline.build_sequence(corpus, Resolution.yearly())
    assert edge_counts(seq) == [(3, 0, 4), (2, 1, 1)]
    assert seq.excluded == 0


@pytest.mark.parametrize(
    "resolution",
    [
        Resolution.maximal(),
        Resolution.daily(),
        Resolution.monthly(),
        Resolution.yearly(),
        Resolution.parse("biepochal", t1="1990:1990", t2="1991:1991"),
    ],
)
def test_every_citation_is_accounted_for(corpus: CitationCorpus, resolution: Resolution) -> None:
    seq = timeline.build_sequence(corpus, resolution)
    assert seq.total_edges + seq.excluded + seq.out_of_scope == corpus.stats.n_citations
    assert seq.total_nodes == corpus.stats.n_articles


def test_bi_epochal_sequence(corpus: CitationCorpus) -> None:
    resolution = Resolution.parse("biepochal", t1="1990-01-01:1990-01-31", t2="1991:1991")
    seq = timeline.build_sequence(corpus, resolution)
    assert seq.T == 2
    assert [step.new_nodes for step in seq] == [("A", "B"), ("D", "E")]
    assert edge_counts(seq) == [(2, 0, 1), (2, 0, 1)]
    assert seq.out_of_scope == 4
    assert seq.excluded == 0


def test_empty_epoch(corpus: CitationCorpus) -> None:
    resolution = Resolution.parse("biepochal", t1="1990:1990", t2="1995:1996")
    with pytest.raises(ConfigurationError):
        timeline.build_sequence(corpus, resolution)


@pytest.mark.parametrize(
    ("t1", "t2"),
    [("1990:1995", "1995:1996"), ("2000:2001", "1990:1991")],
)
def test_invalid_epochs(t1: str, t2: str) -> None:
    with pytest.raises(ConfigurationError):
        Resolution.parse("biepochal", t1=t1, t2=t2)


@pytest.mark.parametrize("value", ["weekly", "biepochal", "coarse-ish"])
def test_invalid_resolution(value: str) -> None:
    with pytest.raises(ConfigurationError):
        Resolution.parse(value)


def test_coarse_resolution_needs_a_sequence(corpus: CitationCorpus) -> None:
    with pytest.raises(ConfigurationError):
        timeline.build_sequence(corpus, Resolution.coarse(2))


def test_chronology_violations(corpus: CitationCorpus) -> None:
    assert timeline.chronology_violations(corpus, Resolution.maximal()) == 1
    assert timeline.chronology_violations(corpus, Resolution.yearly()) == 0


def test_degree_histograms(corpus: CitationCorpus) -> None:
    seq = timeline.build_sequence(corpus, Resolution.maximal())
    assert timeline.degree_histogram_at(seq, 1).counts == {0: 1}
    assert timeline.degree_histogram_at(seq, 3).counts == {0: 1, 1: 1, 2: 1}
    final = timeline.final_histogram(seq)
    assert final.counts == {0: 1, 1: 3, 2: 1}
    assert final.total_nodes == 5
    assert final.total_degree == seq.total_edges
    assert timeline.flat_histogram(corpus).counts == {0: 1, 1: 2, 2: 2}
    with pytest.raises(StepOutOfRange):
        timeline.degree_histogram_at(seq, 6)
    with pytest.raises(StepOutOfRange):
        seq[0]


def test_degree_state() -> None:
    state = timeline.DegreeState()
    state.add_node("a")
    state.add_node("b")
    assert state.add_edge("a") == 0
    assert state.add_edge("a") == 1
    assert state.histogram == {0: 1, 2: 1}
    assert state.snapshot().counts == {0: 1, 2: 1}
    assert state.nodes == 2


def test_coarsen(corpus: CitationCorpus) -> None:
    seq = timeline.coarsen(timeline.build_sequence(corpus, Resolution.maximal()), 2)
    assert seq.resolution.kind is ResolutionKind.COARSE
    assert [step.new_nodes for step in seq] == [("A", "B"), ("C", "D"), ("E",)]
    assert edge_counts(seq) == [(2, 0, 1), (2, 2, 1), (1, 1, 0)]
    assert seq.excluded == 1
    seq.validate()
    with pytest.raises(ConfigurationError):
        timeline.coarsen(seq, 0)


def test_sequence_structure_is_checked() -> None:
    with pytest.raises(ShapeError):
        GrowthSequence((), Resolution.maximal())
    with pytest.raises(ShapeError):
        GrowthSequence((StepDelta(2, ("a",)),), Resolution.maximal())
    with pytest.raises(ShapeError):
        GrowthSequence((StepDelta(1, ("a", "b"), (("a", "b"),)),), Resolution.maximal())
    seq = GrowthSequence(
        (StepDelta(1, ("a",)), StepDelta(2, ("b",), (("b", "c"),))), Resolution.maximal()
    )
    with pytest.raises(ShapeError):
        seq.validate()


def test_describe(corpus: CitationCorpus) -> None:
    summary = timeline.describe(timeline.build_sequence(corpus, Resolution.daily()))
    assert summary["T"] == 3
    assert summary["n1"] == 2
    assert summary["m1_intra"] == 1
    assert summary["total_cross_edges"] == 3
    assert summary["total_intra_edges"] == 2
    assert summary["n_t"]["mean"] == 1.5
    assert summary["resolution"] == {"kind": "daily"}


def test_doubling_time() -> None:
    steps = [StepDelta(1, (0,))]
    node = 1
    for t, size in enumerate([1, 2, 4, 8], start=2):
        steps.append(StepDelta(t, tuple(range(node, node + size))))
        node += size
    seq = GrowthSequence(tuple(steps), Resolution.coarse())
    assert timeline.doubling_time(seq) == pytest.approx(1.0)


def test_doubling_time_without_growth(corpus: CitationCorpus) -> None:
    seq = timeline.build_sequence(corpus, Resolution.maximal())
    assert math.isinf(timeline.doubling_time(seq))


def test_equal_node_windows(corpus: CitationCorpus) -> None:
    seq = timeline.build_sequence(corpus, Resolution.maximal())
    windows = timeline.equal_node_windows(seq, 2)
    assert [(w.first, w.last) for w in windows] == [(2, 3), (4, 5)]
    assert windows[0].contains(seq[3])
    assert not windows[0].overlaps(windows[1])
    with pytest.raises(ShapeError):
        timeline.equal_node_windows(seq, 5)


def test_write_and_read_sequence(corpus: CitationCorpus, tmp_path) -> None:
    seq = timeline.build_sequence(corpus, Resolution.maximal())
    path = timeline.write_sequence(seq, tmp_path / "sequence.jsonl")
    again = timeline.read_sequence(path)
    assert again.steps == seq.steps
    assert again.resolution.kind is ResolutionKind.MAXIMAL


def test_read_sequence_rejects_broken_lines(tmp_path) -> None:
    path = tmp_path / "broken.jsonl"
    path.write_text('{"t": 1, "nodes": [0]}\n{"t": 2}\n')
    with pytest.raises(ShapeError):
        timeline.read_sequence(path)
