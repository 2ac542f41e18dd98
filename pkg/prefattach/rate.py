"""Attachment rate estimators.

Two estimators measure the attachment rate Â(k) from a growth sequence:

* Jeong's measure for two-step sequences,
  ``Â(k) = (n_1 / m_2) * (m_2(k) / n_1(k))``.
* Newman's measure for arbitrary sequences, with the correction that averages each degree only
  over the time-steps at which nodes of that degree exist. With ``w_t(k) = m_t * [n_{t-1}(k) > 0]``
  and ``W(k) = sum_t w_t(k)``::

      Â(k) = sum_t w_t(k) / W(k) * (N_{t-1} / m_t) * m_t(k) / n_{t-1}(k)

  The default ``per_step`` normalization rescales every step by ``N_{t-1} / m_t``, which keeps the
  estimate consistent when the normalizing sum of the attachment probabilities grows with the
  network. The ``global`` normalization instead multiplies the plain weighted average by the
  constant ``Z = sum_t N_{t-1} / m_t``. Both reduce exactly to Jeong's measure for ``T = 2``.

Steps with ``m_t = 0`` contribute nothing. Degrees without any observed edge are omitted
(the ``0/0 = 0`` convention), but their exposure, the node-steps ``sum_t n_{t-1}(k)`` spent at
risk of being cited, is kept so that binning can pool them.
"""

from __future__ import annotations

import logging
import warnings
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import TYPE_CHECKING
from typing import Any
from typing import Callable
from typing import Union

import numpy as np

from prefattach import common
from prefattach.domain import Estimator
from prefattach.domain import Normalization
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import ShapeError
from prefattach.ingest import DateInterval
from prefattach.timeline import DegreeState
from prefattach.timeline import GrowthSequence
from prefattach.timeline import StepDelta
from prefattach.timeline import StepWindow


if TYPE_CHECKING:
    from prefattach.affit import AttachmentFunctionFit


logger = logging.getLogger(__name__)

DEFAULT_HALF_WIDTH = 0.025

Window = Union[DateInterval, StepWindow]
StepFilter = Callable[[StepDelta], bool]


@dataclass(frozen=True)
class RatePoint:
    """One measured (or binned) rate.

    ``exposure`` counts node-steps at risk: ``sum_t n_{t-1}(k)`` over the measured steps for a raw
    point, the mean over the degrees of the window for a binned one.
    """

    k: int
    a_hat: float
    support: int
    exposure: float = field(default=1.0, compare=False)


@dataclass(frozen=True)
class AttachmentRateEstimate:
    """Measured attachment rate, one point per in-degree with at least one observed edge.

    ``exposure`` maps every degree that was populated during a measured step to its node-steps at
    risk, including degrees that never received an edge.
    """

    points: tuple[RatePoint, ...]
    estimator: Estimator
    normalization: Normalization | None = None
    z: float | None = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)
    exposure: dict[int, float] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.points)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.array([p.k for p in self.points], dtype=np.int64),
            np.array([p.a_hat for p in self.points], dtype=np.float64),
            np.array([p.support for p in self.points], dtype=np.int64),
        )

    def as_dict(self) -> dict[int, float]:
        return {p.k: p.a_hat for p in self.points}

    def scaled(self, factor: float) -> AttachmentRateEstimate:
        """The same estimate with every Â(k) multiplied by ``factor``."""
        points = tuple(
            RatePoint(p.k, p.a_hat * factor, p.support, p.exposure) for p in self.points
        )
        z = None if self.z is None else self.z * factor
        return AttachmentRateEstimate(
            points, self.estimator, self.normalization, z, self.metadata, self.exposure
        )

    def describe(self) -> dict[str, Any]:
        return {
            "estimator": self.estimator.value,
            "normalization": None if self.normalization is None else self.normalization.value,
            "z": self.z,
            "n_points": len(self.points),
            **self.metadata,
        }


@dataclass(frozen=True)
class BinnedRate:
    """Attachment rate averaged over the relative window ``[k (1 - h), k (1 + h)]``."""

    points: tuple[RatePoint, ...]
    half_width: float
    estimator: Estimator
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.points)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.array([p.k for p in self.points], dtype=np.int64),
            np.array([p.a_hat for p in self.points], dtype=np.float64),
            np.array([p.support for p in self.points], dtype=np.int64),
        )

    def exposures(self) -> np.ndarray:
        return np.array([p.exposure for p in self.points], dtype=np.float64)

    @classmethod
    def from_arrays(
        cls,
        k: Sequence[int] | np.ndarray,
        a_hat: Sequence[float] | np.ndarray,
        support: Sequence[int] | np.ndarray | None = None,
        half_width: float = 0.0,
        estimator: Estimator = Estimator.NEWMAN_CORRECTED,
    ) -> BinnedRate:
        if support is None:
            support = [1] * len(k)
        points = tuple(
            RatePoint(int(ki), float(ai), int(si))
            for ki, ai, si in sorted(zip(k, a_hat, support), key=lambda row: row[0])
        )
        return cls(points, half_width, estimator)

    def describe(self) -> dict[str, Any]:
        return {
            "estimator": self.estimator.value,
            "half_width": self.half_width,
            "n_bins": len(self.points),
            **self.metadata,
        }


@dataclass
class NewmanAccumulator:
    """Sufficient statistics of Newman's measure gathered in a fold over a growth sequence.

    Attributes:
        weight: ``W(k)``, the total ``m_t`` over measured steps at which ``n_{t-1}(k) > 0``.
        support: Observed edges per degree, ``sum_t m_t(k)``.
        exposure: Node-steps at risk per degree, ``sum_t n_{t-1}(k)`` over measured steps.
        z: ``Z = sum_t N_{t-1} / m_t`` over measured steps with ``m_t > 0``.
        total_edges: ``sum_t m_t`` over measured steps.
        steps: Number of measured steps with ``m_t > 0``.
    """

    weight: dict[int, float] = field(default_factory=dict)
    support: Counter[int] = field(default_factory=Counter)
    exposure: dict[int, float] = field(default_factory=dict)
    z: float = 0.0
    total_edges: int = 0
    steps: int = 0

    @classmethod
    def gather(cls, seq: GrowthSequence, include: StepFilter | None = None) -> NewmanAccumulator:
        """First pass: degree weights ``W(k)`` from the intervals during which ``n(k) > 0``.

        Exposure is settled lazily: a degree's count is charged for the measured steps elapsed
        since its last change, whenever it changes and once more at the end.
        """
        acc = cls()
        state = DegreeState()
        state.apply(seq.steps[0])
        opened: dict[int, int] = dict.fromkeys(state.histogram, 0)
        settled: dict[int, int] = dict.fromkeys(state.histogram, 0)
        exposure: dict[int, int] = {}
        measured = 0

        def settle(k: int) -> None:
            count = state.histogram.get(k, 0)
            if count:
                exposure[k] = exposure.get(k, 0) + count * (acc.steps - settled[k])
            settled[k] = acc.steps

        for step in seq.steps[1:]:
            if step.m and (include is None or include(step)):
                for _, target in step.cross_edges:
                    acc.support[state.degree[target]] += 1
                acc.z += state.nodes / step.m
                acc.steps += 1
                measured += step.m
            for node in step.new_nodes:
                if 0 not in state.histogram:
                    opened[0] = measured
                settle(0)
                state.add_node(node)
            for _, target in (*step.cross_edges, *step.intra_edges):
                settle(state.degree[target])
                settle(state.degree[target] + 1)
                k = state.add_edge(target)
                if k not in state.histogram:
                    acc.weight[k] = acc.weight.get(k, 0) + measured - opened.pop(k)
                if state.histogram[k + 1] == 1:
                    opened[k + 1] = measured
        for k, start in opened.items():
            acc.weight[k] = acc.weight.get(k, 0) + measured - start
        for k in list(state.histogram):
            settle(k)
        acc.total_edges = measured
        acc.weight = {k: float(w) for k, w in acc.weight.items() if w > 0}
        acc.exposure = {k: float(e) for k, e in sorted(exposure.items()) if e > 0}
        return acc


def _newman_sums(
    seq: GrowthSequence,
    acc: NewmanAccumulator,
    corrected: bool,
    normalization: Normalization,
    include: StepFilter | None,
) -> dict[int, float]:
    """Second pass: the weighted sum of the per-step ratios ``m_t(k) / n_{t-1}(k)``."""
    sums: dict[int, float] = {}
    state = DegreeState()
    state.apply(seq.steps[0])
    for step in seq.steps[1:]:
        if step.m and (include is None or include(step)):
            m = step.m
            scale = state.nodes / m
            observed = Counter(state.degree[target] for _, target in step.cross_edges)
            for k, m_k in observed.items():
                ratio = m_k / state.histogram[k]
                share = m / acc.weight[k] if corrected else m / acc.total_edges
                if normalization is Normalization.PER_STEP:
                    term = share * (scale * ratio)
                else:
                    term = share * ratio
                sums[k] = sums.get(k, 0.0) + term
        state.apply(step)
    return sums


def jeong_rate(seq: GrowthSequence) -> AttachmentRateEstimate:
    """Jeong's two-step measure ``Â(k) = (n_1 / m_2) * (m_2(k) / n_1(k))``.

    Raises:
        ShapeError: If the sequence does not have exactly two steps.

    Examples:

        >>> from prefattach.timeline import Resolution
        >>> seq = GrowthSequence(
        ...     (
        ...         StepDelta(1, ("a", "b", "c"), (), (("a", "c"),)),
        ...         StepDelta(2, ("d", "e"), (("d", "c"), ("e", "a"))),
        ...     ),
        ...     Resolution.bi_epochal(),
        ... )
        >>> jeong_rate(seq).as_dict()
        {0: 0.75, 1: 1.5}
    """
    if seq.T != 2:
        raise ShapeError(f"Jeong's measure needs a two-step sequence, got T={seq.T}")
    state = DegreeState()
    state.apply(seq.steps[0])
    n1 = state.nodes
    m2 = seq.steps[1].m
    if m2 == 0:
        logger.warning("The second step adds no cross edges, the estimate is empty")
        return AttachmentRateEstimate((), Estimator.JEONG, None, None)
    observed = Counter(state.degree[target] for _, target in seq.steps[1].cross_edges)
    z = n1 / m2
    exposure = {k: float(n_k) for k, n_k in sorted(state.histogram.items())}
    points = tuple(
        RatePoint(k, z * (m_k / state.histogram[k]), m_k, exposure[k])
        for k, m_k in sorted(observed.items())
    )
    metadata = {"n1": n1, "m2": m2}
    return AttachmentRateEstimate(points, Estimator.JEONG, None, z, metadata, exposure)


def newman_rate(
    seq: GrowthSequence,
    variant: str | Estimator = Estimator.NEWMAN_CORRECTED,
    normalization: str | Normalization = Normalization.PER_STEP,
    include: StepFilter | None = None,
) -> AttachmentRateEstimate:
    """Newman's multi-step measure.

    Args:
        seq (GrowthSequence): A sequence with at least two steps.
        variant (str | Estimator): ``corrected`` (default) divides by ``W(k)``; ``uncorrected``
            divides by the total ``sum_t m_t`` and shows the historical high-k bias.
        normalization (str | Normalization): ``per_step`` (default) or ``global``. ``global`` is
            the literal form ``Â(k) = (Z / W(k)) * sum_t w_t(k) * m_t(k) / n_{t-1}(k)``.
        include (Callable[[StepDelta], bool] | None): Restricts the measured steps. Degrees still
            accumulate over the full history.

    Raises:
        ShapeError: If the sequence has a single step.
    """
    estimator = _parse_variant(variant)
    normalization = Normalization(normalization)
    if seq.T < 2:
        raise ShapeError("Newman's measure needs at least two time-steps")
    corrected = estimator is Estimator.NEWMAN_CORRECTED
    if not corrected:
        warnings.warn(
            "The uncorrected Newman measure underestimates the rate at large degrees and is "
            "only meant as a diagnostic",
            stacklevel=2,
        )

    acc = NewmanAccumulator.gather(seq, include)
    metadata = {"measured_steps": acc.steps, "total_edges": acc.total_edges}
    if acc.total_edges == 0:
        logger.warning("No measured time-step adds cross edges, the estimate is empty")
        return AttachmentRateEstimate((), estimator, normalization, None, metadata)

    sums = _newman_sums(seq, acc, corrected, normalization, include)
    if normalization is Normalization.GLOBAL:
        sums = {k: acc.z * value for k, value in sums.items()}
    points = tuple(
        RatePoint(k, sums[k], acc.support[k], acc.exposure[k]) for k in sorted(sums)
    )
    return AttachmentRateEstimate(points, estimator, normalization, acc.z, metadata, acc.exposure)


def _parse_variant(variant: str | Estimator) -> Estimator:
    aliases = {
        "corrected": Estimator.NEWMAN_CORRECTED,
        "newman": Estimator.NEWMAN_CORRECTED,
        "uncorrected": Estimator.NEWMAN_UNCORRECTED,
    }
    if not isinstance(variant, Estimator):
        try:
            variant = aliases.get(variant) or Estimator(variant)
        except ValueError as e:
            raise ConfigurationError(f"Unknown Newman variant '{variant}'") from e
    if variant is Estimator.JEONG:
        raise ConfigurationError("Use jeong_rate() for Jeong's measure")
    return variant


def bin_rate(est: AttachmentRateEstimate, half_width: float = DEFAULT_HALF_WIDTH) -> BinnedRate:
    """Pool Â over the closed windows ``[k_i (1 - h), k_i (1 + h)]``, weighted by exposure.

    One bin is centred on every observed degree. A bin's value is
    ``sum_k E(k) Â(k) / sum_k E(k)`` over all degrees of the window that were at risk, including
    those that never received an edge, where ``E(k)`` is the node-steps at risk.
    Estimates without an exposure map weight their points by :attr:`RatePoint.exposure`.

    Examples:

        >>> est = AttachmentRateEstimate(
        ...     (RatePoint(100, 1.0, 1), RatePoint(102, 3.0, 1)), Estimator.NEWMAN_CORRECTED
        ... )
        >>> [p.a_hat for p in bin_rate(est).points]
        [2.0, 2.0]
    """
    if not est.points:
        raise ShapeError("Cannot bin an empty attachment rate estimate")
    if not 0 <= half_width < 1:
        raise ConfigurationError(f"The half width must lie in [0, 1), got {half_width}")
    k, a_hat, support = est.arrays()
    at_risk = {**{p.k: p.exposure for p in est.points}, **est.exposure}
    grid = np.array(sorted(at_risk), dtype=np.int64)
    exposure = np.array([at_risk[g] for g in grid.tolist()], dtype=np.float64)
    mass = np.zeros(grid.size, dtype=np.float64)
    edges = np.zeros(grid.size, dtype=np.int64)
    index = np.searchsorted(grid, k)
    mass[index] = exposure[index] * a_hat
    edges[index] = support

    kf = k.astype(np.float64)
    gf = grid.astype(np.float64)
    tolerance = 1e-9 * np.maximum(kf, 1.0)
    lower = np.searchsorted(gf, kf * (1 - half_width) - tolerance, side="left")
    upper = np.searchsorted(gf, kf * (1 + half_width) + tolerance, side="right")
    points = []
    for i in range(k.size):
        lo, hi = lower[i], upper[i]
        if hi - lo == 1:
            points.append(est.points[i])
            continue
        total = float(exposure[lo:hi].sum())
        value = float(mass[lo:hi].sum()) / total
        count = int(edges[lo:hi].sum())
        points.append(RatePoint(int(k[i]), value, count, total / (hi - lo)))
    metadata = {"estimate": est.describe()}
    return BinnedRate(tuple(points), half_width, est.estimator, metadata)


def _window_filter(window: Window) -> StepFilter:
    if isinstance(window, StepWindow):
        return window.contains

    def contains(step: StepDelta) -> bool:
        return step.date is not None and window.contains(step.date)

    return contains


def _check_windows(windows: Sequence[Window]) -> None:
    for previous, current in zip(windows, windows[1:]):
        if type(previous) is not type(current):
            raise ConfigurationError("Windows must either all be dates or all be step ranges")
        if previous.overlaps(current):  # type: ignore[arg-type]
            raise ConfigurationError(f"Windows {previous} and {current} overlap")
        first = previous.start if isinstance(previous, DateInterval) else previous.first
        second = current.start if isinstance(current, DateInterval) else current.first
        if first > second:  # type: ignore[operator]
            raise ConfigurationError(f"Windows {previous} and {current} are not chronological")


@dataclass(frozen=True)
class WindowedAlpha:
    window: Window
    alpha: float
    fit: AttachmentFunctionFit
    estimate: AttachmentRateEstimate


def windowed_alpha(
    seq: GrowthSequence,
    windows: Sequence[Window],
    half_width: float = DEFAULT_HALF_WIDTH,
    min_support: int = 1,
    normalization: str | Normalization = Normalization.PER_STEP,
    min_exposure: float = 0.0,
) -> list[WindowedAlpha]:
    """Log-linear attachment exponent measured separately within each time window.

    Only the steps inside a window are measured, the degree histograms accumulate over the full
    history. Windows without steps are skipped with a warning.
    """
    from prefattach import affit

    _check_windows(windows)
    results = []
    for window in windows:
        include = _window_filter(window)
        if not any(include(step) for step in seq.steps[1:]):
            logger.warning("Window %s contains no time-steps and is skipped", window)
            continue
        estimate = newman_rate(seq, Estimator.NEWMAN_CORRECTED, normalization, include)
        if not estimate.points:
            logger.warning("Window %s contains no cross edges and is skipped", window)
            continue
        fit = affit.fit_af(
            bin_rate(estimate, half_width),
            "log_linear",
            min_support=min_support,
            min_exposure=min_exposure,
        )
        logger.info("Window %s: alpha=%.4f", window, fit.shape)
        results.append(WindowedAlpha(window, fit.shape, fit, estimate))
    return results


def write_rate(est: AttachmentRateEstimate, path: common.PathLike, **config: Any) -> list[Path]:
    """Write ``k,a_hat,support`` and a JSON sidecar describing the estimate."""
    path = Path(path)
    csv_path = common.write_csv(
        path, ["k", "a_hat", "support"], ((p.k, p.a_hat, p.support) for p in est.points)
    )
    sidecar = common.write_json(path.with_suffix(".json"), {**est.describe(), "config": config})
    return [csv_path, sidecar]


def write_binned(binned: BinnedRate, path: common.PathLike, **config: Any) -> list[Path]:
    path = Path(path)
    csv_path = common.write_csv(
        path,
        ["k", "a_hat_binned", "support"],
        ((p.k, p.a_hat, p.support) for p in binned.points),
    )
    sidecar = common.write_json(path.with_suffix(".json"), {**binned.describe(), "config": config})
    return [csv_path, sidecar]


def read_binned(path: common.PathLike) -> BinnedRate:
    """Read a binned (or raw) rate CSV back for attachment function fitting."""
    header, rows = common.read_csv(path)
    if len(header) != 3 or header[0] != "k":
        raise ConfigurationError(f"Unexpected rate file header {header} in {path}")
    try:
        k = [int(row[0]) for row in rows]
        a_hat = [float(row[1]) for row in rows]
        support = [int(row[2]) for row in rows]
    except (ValueError, IndexError) as e:
        raise ConfigurationError(f"Malformed rate file {path}: {e}") from e
    return BinnedRate.from_arrays(k, a_hat, support)
