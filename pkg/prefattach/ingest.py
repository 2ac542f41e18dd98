"""Parsing and cleaning of timestamped citation data.

A corpus is read from two CSV files: a node file with the header ``id,date`` and an edge file
with the header ``citing_id,cited_id``. Cleaning happens in a fixed order so that the removal
counters are deterministic:

1. edges whose citing article is not in the node file are rejected with a :class:`ParseError`,
2. edges with an endpoint outside of the date window or a cited id missing from the node file
   are dropped as dangling,
3. repeated ``(citing, cited)`` pairs are dropped as duplicates, keeping the first occurrence,
4. self-citations are dropped.

Every raw edge therefore ends up in exactly one of ``n_citations``, ``n_dangling_removed``,
``n_duplicates_removed`` or ``n_self_citations_removed``.
"""

from __future__ import annotations

import csv
import io
import logging
import re
from collections.abc import Iterator
from dataclasses import dataclass
from dataclasses import field
from datetime import date
from pathlib import Path
from typing import IO
from typing import Any

from prefattach import common
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import ParseError


try:
    from typing import Self
except ImportError:
    from typing_extensions import Self


logger = logging.getLogger(__name__)

NODES_HEADER = ["id", "date"]
EDGES_HEADER = ["citing_id", "cited_id"]

_date_regex = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def parse_date(value: str) -> date:
    """Parse a strict ``YYYY-MM-DD`` calendar date.

    Examples:

        >>> parse_date("1893-07-01")
        datetime.date(1893, 7, 1)
    """
    if not _date_regex.match(value):
        raise ValueError(f"Invalid date '{value}', expected YYYY-MM-DD")
    return date(int(value[:4]), int(value[5:7]), int(value[8:10]))


@dataclass(frozen=True)
class DateInterval:
    """A closed interval of calendar dates."""

    start: date
    end: date

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ConfigurationError(f"Empty date interval: {self.start} > {self.end}")

    @classmethod
    def parse(cls, value: str) -> Self:
        """Parse ``START:END`` where each bound is either a year or a full date.

        A year as the lower bound means January 1st, as the upper bound December 31st.

        Examples:

            >>> str(DateInterval.parse("1990:1999"))
            '1990-01-01:1999-12-31'
            >>> str(DateInterval.parse("1893-07-01:2003-06-30"))
            '1893-07-01:2003-06-30'
        """
        try:
            start, end = value.split(":")
            return cls(_parse_bound(start, upper=False), _parse_bound(end, upper=True))
        except ValueError as e:
            raise ConfigurationError(f"Invalid date interval '{value}': {e}") from e

    def contains(self, day: date) -> bool:
        return self.start <= day <= self.end

    def overlaps(self, other: DateInterval) -> bool:
        return self.start <= other.end and other.start <= self.end

    def __str__(self) -> str:
        return f"{self.start.isoformat()}:{self.end.isoformat()}"


def _parse_bound(value: str, upper: bool) -> date:
    value = value.strip()
    if value.isdigit() and len(value) == 4:
        return date(int(value), 12, 31) if upper else date(int(value), 1, 1)
    return parse_date(value)


@dataclass(frozen=True)
class CitationRecord:
    article_id: str
    timestamp: date
    references: tuple[str, ...] = ()

    @property
    def sort_key(self) -> tuple[date, str]:
        return (self.timestamp, self.article_id)


@dataclass(frozen=True)
class CorpusStats:
    n_articles: int
    n_citations: int
    n_duplicates_removed: int = 0
    n_self_citations_removed: int = 0
    n_dangling_removed: int = 0

    @property
    def mean_citations(self) -> float:
        return self.n_citations / self.n_articles if self.n_articles else 0.0

    @property
    def n_raw_edges(self) -> int:
        return (
            self.n_citations
            + self.n_duplicates_removed
            + self.n_self_citations_removed
            + self.n_dangling_removed
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "n_articles": self.n_articles,
            "n_citations": self.n_citations,
            "n_duplicates_removed": self.n_duplicates_removed,
            "n_self_citations_removed": self.n_self_citations_removed,
            "n_dangling_removed": self.n_dangling_removed,
            "mean_citations": self.mean_citations,
        }


@dataclass(frozen=True)
class CitationCorpus:
    records: tuple[CitationRecord, ...]
    stats: CorpusStats
    date_window: DateInterval | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[CitationRecord]:
        return iter(self.records)

    def edges(self) -> Iterator[tuple[str, str]]:
        for record in self.records:
            for cited in record.references:
                yield (record.article_id, cited)


def _text(stream: IO[bytes]) -> io.TextIOWrapper:
    return io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")


def _rows(stream: IO[bytes], header: list[str], source: str) -> Iterator[tuple[int, list[str]]]:
    text = _text(stream)
    reader = csv.reader(text)
    try:
        first = next(reader, None)
        if first is None:
            raise ParseError(f"missing header, expected {','.join(header)}", line=1, source=source)
        if [column.strip() for column in first] != header:
            raise ParseError(
                f"unexpected header {','.join(first)!r}, expected {','.join(header)!r}",
                line=1,
                source=source,
            )
        for row in reader:
            if not row:
                continue
            if len(row) != len(header) or not all(value.strip() for value in row):
                raise ParseError(
                    f"malformed row {','.join(row)!r}", line=reader.line_num, source=source
                )
            yield reader.line_num, [value.strip() for value in row]
    except csv.Error as e:
        raise ParseError(str(e), line=reader.line_num, source=source) from e
    except UnicodeDecodeError as e:
        raise ParseError(f"invalid UTF-8: {e}", source=source) from e
    finally:
        # leave the caller's stream open
        text.detach()


def _read_nodes(stream: IO[bytes]) -> dict[str, date]:
    nodes: dict[str, date] = {}
    for line, (article_id, value) in _rows(stream, NODES_HEADER, "nodes"):
        try:
            timestamp = parse_date(value)
        except ValueError as e:
            raise ParseError(str(e), line=line, source="nodes") from e
        if article_id in nodes:
            raise ParseError(f"duplicate article id '{article_id}'", line=line, source="nodes")
        nodes[article_id] = timestamp
    return nodes


def parse_corpus(
    nodes_file: IO[bytes],
    edges_file: IO[bytes],
    date_window: DateInterval | tuple[date, date] | None = None,
) -> CitationCorpus:
    """Parse and clean a citation corpus.

    Args:
        nodes_file (IO[bytes]): The node CSV as binary stream.
        edges_file (IO[bytes]): The edge CSV as binary stream.
        date_window (DateInterval | tuple[date, date] | None): Optional closed interval of
            publication dates. Articles outside of it are dropped together with every edge that
            touches them.

    Raises:
        ParseError: If a row is malformed, a date cannot be parsed or an edge references an
            unknown citing article.

    Examples:

        >>> nodes = io.BytesIO(b"id,date\\nA,2000-01-01\\nB,1999-01-01\\n")
        >>> edges = io.BytesIO(b"citing_id,cited_id\\nA,A\\nA,B\\nA,B\\n")
        >>> corpus = parse_corpus(nodes, edges)
        >>> corpus.stats.n_citations, corpus.stats.n_duplicates_removed
        (1, 1)
        >>> [record.article_id for record in corpus]
        ['B', 'A']
    """
    if isinstance(date_window, tuple):
        date_window = DateInterval(*date_window)

    nodes = _read_nodes(nodes_file)
    if date_window is None:
        retained = nodes
    else:
        retained = {key: value for key, value in nodes.items() if date_window.contains(value)}

    references: dict[str, list[str]] = {article_id: [] for article_id in retained}
    seen: set[tuple[str, str]] = set()
    n_dangling = n_duplicates = n_self = 0
    for line, (citing, cited) in _rows(edges_file, EDGES_HEADER, "edges"):
        if citing not in nodes:
            raise ParseError(f"unknown citing article '{citing}'", line=line, source="edges")
        if cited not in retained or citing not in retained:
            n_dangling += 1
            continue
        pair = (citing, cited)
        if pair in seen:
            n_duplicates += 1
            continue
        seen.add(pair)
        if citing == cited:
            n_self += 1
            continue
        references[citing].append(cited)

    records = tuple(
        sorted(
            (
                CitationRecord(article_id, timestamp, tuple(references[article_id]))
                for article_id, timestamp in retained.items()
            ),
            key=lambda record: record.sort_key,
        )
    )
    stats = CorpusStats(
        n_articles=len(records),
        n_citations=sum(len(refs) for refs in references.values()),
        n_duplicates_removed=n_duplicates,
        n_self_citations_removed=n_self,
        n_dangling_removed=n_dangling,
    )
    logger.info(
        "Parsed %d articles and %d citations (%d duplicates, %d self-citations, %d dangling)",
        stats.n_articles,
        stats.n_citations,
        n_duplicates,
        n_self,
        n_dangling,
    )
    return CitationCorpus(records, stats, date_window)


def read_corpus(
    nodes_path: common.PathLike,
    edges_path: common.PathLike,
    date_window: DateInterval | tuple[date, date] | None = None,
) -> CitationCorpus:
    with Path(nodes_path).open("rb") as nodes_file, Path(edges_path).open("rb") as edges_file:
        return parse_corpus(nodes_file, edges_file, date_window)


def corpus_summary(corpus: CitationCorpus) -> CorpusStats:
    """Recompute the article and citation counts from the records.

    The removal counters cannot be derived from the cleaned records and are carried over from the
    stored statistics.
    """
    stats = CorpusStats(
        n_articles=len(corpus.records),
        n_citations=sum(len(record.references) for record in corpus.records),
        n_duplicates_removed=corpus.stats.n_duplicates_removed,
        n_self_citations_removed=corpus.stats.n_self_citations_removed,
        n_dangling_removed=corpus.stats.n_dangling_removed,
    )
    if stats != corpus.stats:
        logger.warning("Stored corpus statistics %s differ from records %s", corpus.stats, stats)
    return stats


def write_canonical(corpus: CitationCorpus, directory: common.PathLike) -> list[Path]:
    """Emit the cleaned corpus as ``nodes.csv``, ``edges.csv`` and ``stats.json``."""
    directory = Path(directory)
    nodes = common.write_csv(
        directory / "nodes.csv",
        NODES_HEADER,
        ((record.article_id, record.timestamp.isoformat()) for record in corpus.records),
    )
    edges = common.write_csv(directory / "edges.csv", EDGES_HEADER, corpus.edges())
    stats = common.write_json(directory / "stats.json", corpus.stats.to_json())
    return [nodes, edges, stats]
