from __future__ import annotations

import io
from datetime import date

import pytest

from prefattach import ingest
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import ParseError


NODES = b"""id,date
A,1990-01-01
B,1990-06-01
C,1991-01-01
D,1992-03-04
"""

EDGES = b"""citing_id,cited_id
B,A
C,A
C,B
C,B
D,D
D,C
D,X
"""


def parse(nodes: bytes = NODES, edges: bytes = EDGES, **kwargs) -> ingest.CitationCorpus:
    return ingest.parse_corpus(io.BytesIO(nodes), io.BytesIO(edges), **kwargs)


def test_parse_corpus() -> None:
    corpus = parse()
    assert [record.article_id for record in corpus] == ["A", "B", "C", "D"]
    assert corpus.records[2].references == ("A", "B")
    assert corpus.records[3].timestamp == date(1992, 3, 4)
    stats = corpus.stats
    assert stats.n_articles == 4
    assert stats.n_citations == 4
    assert stats.n_duplicates_removed == 1
    assert stats.n_self_citations_removed == 1
    assert stats.n_dangling_removed == 1
    assert stats.n_raw_edges == 7
    assert stats.mean_citations == 1.0


def test_records_are_sorted_by_date_then_id() -> None:
    nodes = b"id,date\nZ,2000-01-01\nY,2000-01-01\nX,1999-12-31\n"
    corpus = parse(nodes, b"citing_id,cited_id\n")
    assert [record.article_id for record in corpus] == ["X", "Y", "Z"]


def test_date_window_drops_articles_and_their_edges() -> None:
    corpus = parse(date_window=ingest.DateInterval.parse("1990:1991"))
    assert [record.article_id for record in corpus] == ["A", "B", "C"]
    assert corpus.stats.n_citations == 3
    # D's two edges plus the one to the unknown X
    assert corpus.stats.n_dangling_removed == 3
    assert corpus.stats.n_raw_edges == 7


def test_date_window_as_tuple() -> None:
    corpus = parse(date_window=(date(1991, 1, 1), date(1992, 12, 31)))
    assert [record.article_id for record in corpus] == ["C", "D"]


def test_bom_and_blank_lines() -> None:
    nodes = b"\xef\xbb\xbfid,date\nA,2000-01-01\n\nB,2000-01-02\n"
    corpus = parse(nodes, b"citing_id,cited_id\nB,A\n")
    assert len(corpus) == 2
    assert corpus.stats.n_citations == 1


@pytest.mark.parametrize(
    ("nodes", "edges", "source", "line"),
    [
        (b"identifier,date\nA,2000-01-01\n", b"citing_id,cited_id\n", "nodes", 1),
        (b"id,date\nA,2000-13-01\n", b"citing_id,cited_id\n", "nodes", 2),
        (b"id,date\nA,2000/01/01\n", b"citing_id,cited_id\n", "nodes", 2),
        (b"id,date\nA,2000-01-01\nA,2000-01-02\n", b"citing_id,cited_id\n", "nodes", 3),
        (b"id,date\nA,2000-01-01,x\n", b"citing_id,cited_id\n", "nodes", 2),
        (b"id,date\nA,2000-01-01\n", b"citing_id,cited_id\nQ,A\n", "edges", 2),
        (b"id,date\nA,2000-01-01\n", b"citing_id,cited_id\nA,\n", "edges", 2),
        (b"", b"citing_id,cited_id\n", "nodes", 1),
    ],
)
def test_parse_errors(nodes: bytes, edges: bytes, source: str, line: int) -> None:
    with pytest.raises(ParseError) as exc:
        parse(nodes, edges)
    assert exc.value.source == source
    assert exc.value.line == line
    assert f"{source} line {line}" in str(exc.value)


def test_invalid_utf8() -> None:
    with pytest.raises(ParseError):
        parse(b"id,date\n\xff\xfe,2000-01-01\n", b"citing_id,cited_id\n")


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        ("1990:1999", "1990-01-01:1999-12-31"),
        ("1893-07-01:2003-06-30", "1893-07-01:2003-06-30"),
        ("2000:2000", "2000-01-01:2000-12-31"),
    ],
)
def test_date_interval_parse(value: str, expected: str) -> None:
    assert str(ingest.DateInterval.parse(value)) == expected


@pytest.mark.parametrize("value", ["1999:1990", "1990", "1990:19x9", "a:b:c"])
def test_date_interval_invalid(value: str) -> None:
    with pytest.raises(ConfigurationError):
        ingest.DateInterval.parse(value)


def test_date_interval_overlaps() -> None:
    first = ingest.DateInterval.parse("1990:1999")
    assert first.overlaps(ingest.DateInterval.parse("1999:2005"))
    assert not first.overlaps(ingest.DateInterval.parse("2000:2005"))
    assert first.contains(date(1995, 5, 5))


def test_corpus_summary_matches_stats() -> None:
    corpus = parse()
    assert ingest.corpus_summary(corpus) == corpus.stats


def test_read_and_write_canonical(tmp_path) -> None:
    (tmp_path / "nodes.csv").write_bytes(NODES)
    (tmp_path / "edges.csv").write_bytes(EDGES)
    corpus = ingest.read_corpus(tmp_path / "nodes.csv", tmp_path / "edges.csv")
    paths = ingest.write_canonical(corpus, tmp_path / "clean")
    assert [path.name for path in paths] == ["nodes.csv", "edges.csv", "stats.json"]
    again = ingest.read_corpus(paths[0], paths[1])
    assert again.records == corpus.records
    assert again.stats.n_citations == corpus.stats.n_citations
    assert again.stats.n_duplicates_removed == 0
    assert (tmp_path / "clean" / "edges.csv").read_text().splitlines()[0] == "citing_id,cited_id"
