"""Growth sequences: a network as a nested series of snapshots G_1 ⊂ G_2 ⊂ ... ⊂ G_T.

A :class:`GrowthSequence` stores one :class:`StepDelta` per time-step. Step ``t`` adds
``n_t`` nodes, ``m_t`` *cross* edges from the new nodes to nodes of G_{t-1} and ``m_t'``
*intra* edges among the new nodes. The first step is the initial network; its internal edges are
intra edges.

The mapping from article timestamps to time-steps is selected through a :class:`Resolution`.
"""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from collections.abc import Hashable
from collections.abc import Iterable
from collections.abc import Iterator
from dataclasses import dataclass
from dataclasses import field
from datetime import date
from pathlib import Path
from typing import Any
from typing import Callable
from typing import Dict
from typing import Tuple
from typing import Union

import numpy as np

from prefattach import common
from prefattach.domain import ResolutionKind
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import PrefAttachException
from prefattach.exceptions import ShapeError
from prefattach.exceptions import StepOutOfRange
from prefattach.ingest import CitationCorpus
from prefattach.ingest import DateInterval
from prefattach.ingest import parse_date


try:
    from typing import Self
except ImportError:
    from typing_extensions import Self


logger = logging.getLogger(__name__)

NodeId = Union[int, str]
Edge = Tuple[NodeId, NodeId]


@dataclass(frozen=True)
class Resolution:
    """The rule mapping article timestamps to time-steps.

    Bi-epochal resolutions built from a corpus carry the two epochs ``t1`` and ``t2``. Sequences
    that did not come from a corpus (simulations, re-bucketed streams) may omit them.
    """

    kind: ResolutionKind
    t1: DateInterval | None = None
    t2: DateInterval | None = None
    nodes_per_step: int | None = None

    def __post_init__(self) -> None:
        if self.kind is ResolutionKind.BI_EPOCHAL:
            if (self.t1 is None) != (self.t2 is None):
                raise ConfigurationError("A bi-epochal resolution needs both epochs T1 and T2")
            if self.t1 is not None and self.t2 is not None:
                if self.t1.overlaps(self.t2):
                    raise ConfigurationError(f"Epochs {self.t1} and {self.t2} overlap")
                if self.t1.start > self.t2.start:
                    raise ConfigurationError(f"Epoch T1 {self.t1} must precede T2 {self.t2}")
        elif self.t1 is not None or self.t2 is not None:
            raise ConfigurationError(f"Epochs are only valid for bi-epochal, not {self.kind.value}")
        if self.nodes_per_step is not None and self.nodes_per_step < 1:
            raise ConfigurationError(f"Invalid bucket size {self.nodes_per_step}")

    @classmethod
    def maximal(cls) -> Self:
        return cls(ResolutionKind.MAXIMAL)

    @classmethod
    def daily(cls) -> Self:
        return cls(ResolutionKind.DAILY)

    @classmethod
    def monthly(cls) -> Self:
        return cls(ResolutionKind.MONTHLY)

    @classmethod
    def yearly(cls) -> Self:
        return cls(ResolutionKind.YEARLY)

    @classmethod
    def bi_epochal(cls, t1: DateInterval | None = None, t2: DateInterval | None = None) -> Self:
        return cls(ResolutionKind.BI_EPOCHAL, t1, t2)

    @classmethod
    def coarse(cls, nodes_per_step: int | None = None) -> Self:
        return cls(ResolutionKind.COARSE, nodes_per_step=nodes_per_step)

    @classmethod
    def parse(cls, value: str, t1: str | None = None, t2: str | None = None) -> Self:
        """Create a resolution from its name.

        Examples:

            >>> Resolution.parse("yearly").kind
            <ResolutionKind.YEARLY: 'yearly'>
            >>> str(Resolution.parse("biepochal", t1="1990:1999", t2="2000:2000").t2)
            '2000-01-01:2000-12-31'
        """
        name = value.strip().lower().replace("-", "_")
        if name in ("biepochal", "bi_epochal"):
            if t1 is None or t2 is None:
                raise ConfigurationError("A bi-epochal resolution needs both epochs T1 and T2")
            return cls.bi_epochal(DateInterval.parse(t1), DateInterval.parse(t2))
        try:
            kind = ResolutionKind(name)
        except ValueError as e:
            raise ConfigurationError(f"Unknown resolution '{value}'") from e
        return cls(kind)

    def bucket(self, day: date) -> Hashable:
        if self.kind is ResolutionKind.DAILY:
            return day
        if self.kind is ResolutionKind.MONTHLY:
            return (day.year, day.month)
        if self.kind is ResolutionKind.YEARLY:
            return day.year
        raise ConfigurationError(f"Resolution {self.kind.value} has no calendar buckets")

    def describe(self) -> dict[str, Any]:
        description: dict[str, Any] = {"kind": self.kind.value}
        if self.t1 is not None and self.t2 is not None:
            description.update(t1=str(self.t1), t2=str(self.t2))
        if self.nodes_per_step is not None:
            description["nodes_per_step"] = self.nodes_per_step
        return description

    def __str__(self) -> str:
        if self.t1 is not None:
            return f"{self.kind.value}({self.t1}, {self.t2})"
        if self.nodes_per_step is not None:
            return f"{self.kind.value}({self.nodes_per_step})"
        return self.kind.value


@dataclass(frozen=True)
class StepDelta:
    t: int
    new_nodes: tuple[NodeId, ...]
    cross_edges: tuple[Edge, ...] = ()
    intra_edges: tuple[Edge, ...] = ()
    date: date | None = None

    @property
    def n(self) -> int:
        return len(self.new_nodes)

    @property
    def m(self) -> int:
        return len(self.cross_edges)

    @property
    def m_intra(self) -> int:
        return len(self.intra_edges)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "t": self.t,
            "nodes": list(self.new_nodes),
            "cross": [list(edge) for edge in self.cross_edges],
            "intra": [list(edge) for edge in self.intra_edges],
        }
        if self.date is not None:
            data["date"] = self.date.isoformat()
        return data

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Self:
        return cls(
            t=int(data["t"]),
            new_nodes=tuple(data["nodes"]),
            cross_edges=tuple((src, dst) for src, dst in data.get("cross", [])),
            intra_edges=tuple((src, dst) for src, dst in data.get("intra", [])),
            date=parse_date(data["date"]) if data.get("date") else None,
        )


@dataclass(frozen=True)
class GrowthSequence:
    """An immutable nested network sequence.

    Args:
        steps (tuple[StepDelta, ...]): The steps ``t = 1..T`` in order.
        resolution (Resolution): How the steps were formed.
        excluded (int): Chronology-violating citations left out of the sequence.
        out_of_scope (int): Citations touching articles outside of both epochs (bi-epochal only).
    """

    steps: tuple[StepDelta, ...]
    resolution: Resolution
    excluded: int = 0
    out_of_scope: int = 0

    def __post_init__(self) -> None:
        if not self.steps:
            raise ShapeError("A growth sequence needs at least one step")
        for index, step in enumerate(self.steps, start=1):
            if step.t != index:
                raise ShapeError(f"Step {index} is labelled t={step.t}")
        if self.steps[0].cross_edges:
            raise ShapeError("The initial network cannot have cross edges")

    @property
    def T(self) -> int:  # noqa: N802
        return len(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[StepDelta]:
        return iter(self.steps)

    def __getitem__(self, t: int) -> StepDelta:
        """The step with 1-based index ``t``."""
        if not 1 <= t <= self.T:
            raise StepOutOfRange(f"Step {t} is outside of 1..{self.T}")
        return self.steps[t - 1]

    @property
    def total_nodes(self) -> int:
        return sum(step.n for step in self.steps)

    @property
    def total_edges(self) -> int:
        return sum(step.m + step.m_intra for step in self.steps)

    def validate(self) -> None:
        """Check node uniqueness and that every edge endpoint exists when the edge is added.

        Raises:
            ShapeError: If one of the structural invariants is violated.
        """
        existing: set[NodeId] = set()
        for step in self.steps:
            new = set(step.new_nodes)
            if len(new) != step.n or existing & new:
                raise ShapeError(f"Step {step.t} repeats node ids")
            for src, dst in step.cross_edges:
                if src not in new or dst not in existing:
                    raise ShapeError(f"Cross edge {src}->{dst} at step {step.t} is invalid")
            for src, dst in step.intra_edges:
                if src not in new or dst not in new:
                    raise ShapeError(f"Intra edge {src}->{dst} at step {step.t} is invalid")
            existing |= new


@dataclass(frozen=True)
class DegreeHistogram:
    """Number of nodes ``n(k)`` per in-degree ``k``."""

    counts: Dict[int, int]
    total_nodes: int = field(default=-1)

    def __post_init__(self) -> None:
        if any(k < 0 or n < 0 for k, n in self.counts.items()):
            raise PrefAttachException("Degrees and counts must be non-negative")
        counts = {k: n for k, n in sorted(self.counts.items()) if n > 0}
        object.__setattr__(self, "counts", counts)
        total = sum(counts.values())
        if self.total_nodes == -1:
            object.__setattr__(self, "total_nodes", total)
        elif self.total_nodes != total:
            raise PrefAttachException(f"Counts sum to {total}, not {self.total_nodes}")

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> Self:
        return cls(dict(Counter(int(k) for k in degrees)))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """The observed degrees and their counts as ascending integer arrays."""
        ks = np.fromiter(self.counts.keys(), dtype=np.int64, count=len(self.counts))
        ns = np.fromiter(self.counts.values(), dtype=np.int64, count=len(self.counts))
        return ks, ns

    def degrees(self) -> np.ndarray:
        ks, ns = self.arrays()
        return np.repeat(ks, ns)

    @property
    def total_degree(self) -> int:
        return sum(k * n for k, n in self.counts.items())

    def __len__(self) -> int:
        return self.total_nodes


class DegreeState:
    """In-degree bookkeeping of a network while it grows.

    Tracks the in-degree of every node together with the histogram ``n(k)``; zero counts are
    removed from the histogram so that ``k in state.histogram`` means ``n(k) > 0``.
    """

    def __init__(self) -> None:
        self.degree: dict[NodeId, int] = {}
        self.histogram: dict[int, int] = {}
        self.edges = 0

    @property
    def nodes(self) -> int:
        return len(self.degree)

    def add_node(self, node: NodeId) -> None:
        self.degree[node] = 0
        self.histogram[0] = self.histogram.get(0, 0) + 1

    def add_edge(self, target: NodeId) -> int:
        """Increment the in-degree of ``target`` and return its previous value."""
        k = self.degree[target]
        self.degree[target] = k + 1
        remaining = self.histogram[k] - 1
        if remaining:
            self.histogram[k] = remaining
        else:
            del self.histogram[k]
        self.histogram[k + 1] = self.histogram.get(k + 1, 0) + 1
        self.edges += 1
        return k

    def apply(self, step: StepDelta) -> None:
        for node in step.new_nodes:
            self.add_node(node)
        for _, target in step.cross_edges:
            self.add_edge(target)
        for _, target in step.intra_edges:
            self.add_edge(target)

    def snapshot(self) -> DegreeHistogram:
        return DegreeHistogram(dict(self.histogram), self.nodes)


def degree_histogram_at(seq: GrowthSequence, t: int) -> DegreeHistogram:
    """The in-degree histogram of G_t, counting cross and intra edges of the steps ``1..t``.

    Raises:
        StepOutOfRange: If ``t`` is not within ``1..T``.
    """
    if not 1 <= t <= seq.T:
        raise StepOutOfRange(f"Step {t} is outside of 1..{seq.T}")
    state = DegreeState()
    for step in seq.steps[:t]:
        state.apply(step)
    return state.snapshot()


def final_histogram(seq: GrowthSequence) -> DegreeHistogram:
    return degree_histogram_at(seq, seq.T)


def flat_histogram(corpus: CitationCorpus) -> DegreeHistogram:
    """In-degree histogram of the corpus taken as a single, unordered network."""
    indegree = Counter(cited for _, cited in corpus.edges())
    return DegreeHistogram.from_degrees(indegree.get(r.article_id, 0) for r in corpus.records)


_CROSS, _INTRA, _VIOLATION, _OUT_OF_SCOPE = range(4)


def _assign_steps(corpus: CitationCorpus, resolution: Resolution) -> list[list[int]]:
    """Group record indices into time-steps, in chronological order."""
    records = corpus.records
    kind = resolution.kind
    if kind is ResolutionKind.MAXIMAL:
        return [[index] for index in range(len(records))]
    if kind is ResolutionKind.BI_EPOCHAL:
        if resolution.t1 is None or resolution.t2 is None:
            raise ConfigurationError("Building a bi-epochal sequence needs both epochs T1 and T2")
        epochs: list[list[int]] = [[], []]
        for index, record in enumerate(records):
            if resolution.t1.contains(record.timestamp):
                epochs[0].append(index)
            elif resolution.t2.contains(record.timestamp):
                epochs[1].append(index)
        for name, members in zip(("T1", "T2"), epochs):
            if not members:
                raise ConfigurationError(f"Epoch {name} contains no articles")
        return epochs
    if kind is ResolutionKind.COARSE:
        raise ConfigurationError("Coarse resolutions apply to growth sequences, see coarsen()")

    buckets: list[list[int]] = []
    previous: Hashable = None
    for index, record in enumerate(records):
        key = resolution.bucket(record.timestamp)
        if not buckets or key != previous:
            buckets.append([])
            previous = key
        buckets[-1].append(index)
    return buckets


def _classify(
    corpus: CitationCorpus, resolution: Resolution
) -> tuple[list[list[int]], Callable[[str, str], int]]:
    groups = _assign_steps(corpus, resolution)
    step_of: dict[str, int] = {}
    position: dict[str, int] = {}
    for step_index, members in enumerate(groups):
        for index in members:
            article_id = corpus.records[index].article_id
            step_of[article_id] = step_index
            position[article_id] = index

    def classify(citing: str, cited: str) -> int:
        if citing not in step_of or cited not in step_of:
            return _OUT_OF_SCOPE
        source, target = step_of[citing], step_of[cited]
        if target < source:
            return _CROSS
        if target == source and resolution.kind is not ResolutionKind.MAXIMAL:
            return _INTRA
        return _VIOLATION

    return groups, classify


def chronology_violations(corpus: CitationCorpus, resolution: Resolution) -> int:
    """Count citations whose target is not strictly earlier under ``resolution``.

    Examples:

        >>> import io
        >>> from prefattach.ingest import parse_corpus
        >>> corpus = parse_corpus(
        ...     io.BytesIO(b"id,date\\nA,2000-01-01\\nB,2000-01-01\\n"),
        ...     io.BytesIO(b"citing_id,cited_id\\nA,B\\n"),
        ... )
        >>> chronology_violations(corpus, Resolution.maximal())
        1
        >>> chronology_violations(corpus, Resolution.daily())
        0
    """
    _, classify = _classify(corpus, resolution)
    return sum(1 for citing, cited in corpus.edges() if classify(citing, cited) == _VIOLATION)


def build_sequence(corpus: CitationCorpus, resolution: Resolution) -> GrowthSequence:
    """Map a cleaned corpus to a growth sequence.

    Every retained citation lands in exactly one cross or intra edge list. Citations pointing
    forward in time are excluded and counted in :attr:`GrowthSequence.excluded`; for bi-epochal
    resolutions citations touching articles outside of both epochs are counted in
    :attr:`GrowthSequence.out_of_scope`.

    Raises:
        ConfigurationError: If an epoch of a bi-epochal resolution holds no articles.
    """
    groups, classify = _classify(corpus, resolution)
    records = corpus.records
    violations = out_of_scope = 0
    steps = []
    for t, members in enumerate(groups, start=1):
        cross: list[Edge] = []
        intra: list[Edge] = []
        for index in members:
            record = records[index]
            for cited in record.references:
                category = classify(record.article_id, cited)
                if category == _CROSS:
                    cross.append((record.article_id, cited))
                elif category == _INTRA:
                    intra.append((record.article_id, cited))
                elif category == _VIOLATION:
                    violations += 1
                else:
                    out_of_scope += 1
        steps.append(
            StepDelta(
                t=t,
                new_nodes=tuple(records[index].article_id for index in members),
                cross_edges=tuple(cross),
                intra_edges=tuple(intra),
                date=records[members[0]].timestamp,
            )
        )
    grouped = {index for members in groups for index in members}
    if len(grouped) < len(records):
        out_of_scope += sum(
            len(record.references)
            for index, record in enumerate(records)
            if index not in grouped
        )
    if violations:
        logger.warning(
            "Excluded %d chronology-violating citations at %s resolution", violations, resolution
        )
    logger.info("Built %d time-steps at %s resolution", len(steps), resolution)
    return GrowthSequence(tuple(steps), resolution, violations, out_of_scope)


def coarsen(seq: GrowthSequence, nodes_per_step: int) -> GrowthSequence:
    """Re-bucket a sequence into pseudo time-steps of (at least) ``nodes_per_step`` nodes.

    Consecutive steps are merged until a bucket holds ``nodes_per_step`` nodes. Edges whose
    endpoints fall into the same bucket become intra edges.
    """
    if nodes_per_step < 1:
        raise ConfigurationError(f"Invalid bucket size {nodes_per_step}")
    groups: list[list[StepDelta]] = []
    size = nodes_per_step
    for step in seq.steps:
        if size >= nodes_per_step:
            groups.append([])
            size = 0
        groups[-1].append(step)
        size += step.n

    steps = []
    for t, group in enumerate(groups, start=1):
        new = {node for step in group for node in step.new_nodes}
        cross: list[Edge] = []
        intra: list[Edge] = []
        for step in group:
            for edge in step.cross_edges:
                (intra if edge[1] in new else cross).append(edge)
            intra.extend(step.intra_edges)
        steps.append(
            StepDelta(
                t=t,
                new_nodes=tuple(node for step in group for node in step.new_nodes),
                cross_edges=tuple(cross),
                intra_edges=tuple(intra),
                date=group[0].date,
            )
        )
    return GrowthSequence(tuple(steps), Resolution.coarse(nodes_per_step), seq.excluded)


def describe(seq: GrowthSequence) -> dict[str, Any]:
    """Summary figures of a growth sequence: initial network, totals and per-step statistics."""
    later = seq.steps[1:]
    n_t = np.array([step.n for step in later], dtype=np.float64)
    m_t = np.array([step.m for step in later], dtype=np.float64)
    summary: dict[str, Any] = {
        "resolution": seq.resolution.describe(),
        "T": seq.T,
        "n1": seq.steps[0].n,
        "m1_intra": seq.steps[0].m_intra,
        "total_nodes": seq.total_nodes,
        "total_cross_edges": sum(step.m for step in seq.steps),
        "total_intra_edges": sum(step.m_intra for step in seq.steps),
        "excluded": seq.excluded,
        "out_of_scope": seq.out_of_scope,
    }
    for name, values in (("n_t", n_t), ("m_t", m_t)):
        if values.size:
            summary[name] = {
                "mean": float(values.mean()),
                "std": float(values.std()),
                "min": float(values.min()),
                "max": float(values.max()),
            }
    return summary


def doubling_time(seq: GrowthSequence) -> float:
    """Doubling time of the number of new nodes per period.

    Periods are calendar years when the steps carry dates, otherwise time-steps. The initial
    network is excluded. Returns ``inf`` when the node count does not grow.

    Raises:
        ShapeError: If fewer than two periods are available.
    """
    later = seq.steps[1:]
    counts: Counter[int] = Counter()
    if later and all(step.date is not None for step in later):
        for step in later:
            counts[step.date.year] += step.n  # type: ignore[union-attr]
    else:
        for step in later:
            counts[step.t] += step.n
    periods = sorted(period for period, n in counts.items() if n > 0)
    if len(periods) < 2:
        raise ShapeError("At least two periods with new nodes are needed for a doubling time")
    x = np.array(periods, dtype=np.float64)
    y = np.log([counts[period] for period in periods])
    if np.ptp(y) == 0:
        return math.inf
    slope = float(np.polyfit(x, y, 1)[0])
    return math.log(2) / slope if slope > 0 else math.inf


@dataclass(frozen=True)
class StepWindow:
    """A closed range of time-step indices."""

    first: int
    last: int

    def __post_init__(self) -> None:
        if self.first > self.last:
            raise ConfigurationError(f"Empty step window {self.first}..{self.last}")

    def contains(self, step: StepDelta) -> bool:
        return self.first <= step.t <= self.last

    def overlaps(self, other: StepWindow) -> bool:
        return self.first <= other.last and other.first <= self.last

    def __str__(self) -> str:
        return f"{self.first}..{self.last}"


def equal_node_windows(seq: GrowthSequence, count: int) -> list[StepWindow]:
    """Split the steps ``2..T`` into ``count`` consecutive windows with similar node counts."""
    if count < 1:
        raise ConfigurationError(f"Invalid window count {count}")
    later = seq.steps[1:]
    if len(later) < count:
        raise ShapeError(f"Cannot split {len(later)} steps into {count} windows")
    cumulative = np.cumsum([step.n for step in later])
    targets = cumulative[-1] * np.arange(1, count) / count
    cuts = np.searchsorted(cumulative, targets, side="left")
    bounds = [0]
    for j, cut in enumerate(cuts, start=1):
        lower = bounds[-1] + 1
        upper = len(later) - (count - j)
        bounds.append(int(min(max(cut + 1, lower), upper)))
    bounds.append(len(later))
    return [StepWindow(later[a].t, later[b - 1].t) for a, b in zip(bounds, bounds[1:])]


def write_sequence(seq: GrowthSequence, path: common.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fp:
        for step in seq.steps:
            fp.write(json.dumps(step.to_json(), separators=(",", ":"), sort_keys=True))
            fp.write("\n")
    return path


def read_sequence(path: common.PathLike, resolution: Resolution | None = None) -> GrowthSequence:
    """Read a JSON-lines growth sequence.

    Without an explicit ``resolution`` a two-step sequence is taken as bi-epochal, a sequence
    adding single nodes as maximal and anything else as coarse.
    """
    steps = []
    with Path(path).open(encoding="utf-8") as fp:
        for line_number, line in enumerate(fp, start=1):
            if not line.strip():
                continue
            try:
                steps.append(StepDelta.from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as e:
                raise ShapeError(f"Invalid step on line {line_number} of {path}: {e}") from e
    if resolution is None:
        if len(steps) == 2 and steps[1].n > 1:
            resolution = Resolution.bi_epochal()
        elif all(step.n == 1 for step in steps[1:]):
            resolution = Resolution.maximal()
        else:
            resolution = Resolution.coarse()
    seq = GrowthSequence(tuple(steps), resolution)
    seq.validate()
    return seq
