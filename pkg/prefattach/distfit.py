"""Maximum-likelihood fits of discretised degree distributions.

Degrees are fitted on the shifted scale ``x = k + 1`` so that uncited nodes are part of the
support, and ``k_min`` is reported on that scale: ``k_min = 1`` is the full domain. A fit
restricted from above with ``k_max`` describes the body of the distribution.

The protocol follows the usual tail-fitting recipe: fit each candidate cutoff by maximum
likelihood, choose ``k_min`` by the smallest Kolmogorov-Smirnov distance (or the smallest
plausible cutoff), assess the fit with a semi-parametric bootstrap and compare families by
their likelihood ratios.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from functools import cached_property
from pathlib import Path
from typing import Any
from typing import Union

import numpy as np
from scipy.optimize import minimize
from scipy.optimize import minimize_scalar
from scipy.special import erfc

from prefattach import common
from prefattach import distributions
from prefattach.domain import KminCriterion
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import ConvergenceError
from prefattach.exceptions import DomainError
from prefattach.exceptions import FitError
from prefattach.exceptions import MismatchedSupport
from prefattach.exceptions import ShapeError
from prefattach.timeline import DegreeHistogram


logger = logging.getLogger(__name__)

MIN_TAIL = 10
DEFAULT_BOOTSTRAP = 1000
LOW_BOOTSTRAP = 100
PLAUSIBILITY_LEVEL = 0.10
BODY_NOTE = "no goodness-of-fit p-value is available for a fit of the distribution body"

_GRID_START = 1 << 12
_GRID_MAX = 1 << 20

Degrees = Union[DegreeHistogram, Sequence[int], np.ndarray]


def _degrees(data: Degrees) -> np.ndarray:
    if isinstance(data, DegreeHistogram):
        return data.degrees()
    return np.asarray(data, dtype=np.int64)


@dataclass(frozen=True)
class DistributionModel:
    """A discretised family with fixed parameters on the support ``k_min <= k + 1 <= k_max``.

    Examples:

        >>> model = DistributionModel("exponential", (0.5,), k_min=1)
        >>> round(float(model.pmf(np.arange(100)).sum()), 12)
        1.0
    """

    family: str
    values: tuple[float, ...]
    k_min: int = 1
    k_max: int | None = None

    def __post_init__(self) -> None:
        family = distributions.get(self.family)
        object.__setattr__(self, "family", family.name)
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != len(family.parameters):
            raise ConfigurationError(
                f"Family '{family.name}' takes parameters {family.parameters}, got {self.values}"
            )
        if not family.in_bounds(self.values):
            raise ConfigurationError(f"Parameters {self.values} out of range for '{family.name}'")
        if self.k_min < 1:
            raise ConfigurationError(f"k_min must be at least 1, got {self.k_min}")
        if self.k_max is not None and self.k_max < self.k_min:
            raise ConfigurationError(f"k_max {self.k_max} lies below k_min {self.k_min}")

    @property
    def distribution(self) -> distributions.Family:
        return distributions.families[self.family]

    @property
    def params(self) -> dict[str, float]:
        return dict(zip(self.distribution.parameters, self.values))

    @cached_property
    def log_norm(self) -> float:
        return self.distribution.log_normalizer(self.values, self.k_min, self.k_max)

    def in_support(self, k: np.ndarray) -> np.ndarray:
        x = np.asarray(k) + 1
        inside = x >= self.k_min
        if self.k_max is not None:
            inside &= x <= self.k_max
        return inside

    def log_pmf(self, k: Sequence[int] | np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=np.int64)
        out = np.full(k.shape, -np.inf)
        inside = self.in_support(k)
        out[inside] = self.distribution.log_density(k[inside] + 1, self.values) - self.log_norm
        return out

    def pmf(self, k: Sequence[int] | np.ndarray) -> np.ndarray:
        return np.exp(self.log_pmf(k))

    def cdf_grid(self, k_last: int) -> tuple[np.ndarray, np.ndarray]:
        """Degrees ``k_min - 1 .. k_last`` and ``P(K <= k)`` at each of them."""
        ks = np.arange(self.k_min - 1, max(k_last, self.k_min - 1) + 1)
        return ks, np.cumsum(self.pmf(ks))

    def survival(self, k: Sequence[int] | np.ndarray) -> np.ndarray:
        """``P(K >= k)`` from the exact normalising sums."""
        k = np.asarray(k, dtype=np.int64)
        out = np.ones(k.shape)
        for i, value in np.ndenumerate(k):
            start = int(value) + 1
            if self.k_max is not None and start > self.k_max:
                out[i] = 0.0
            elif start > self.k_min:
                log_tail = self.distribution.log_normalizer(self.values, start, self.k_max)
                out[i] = math.exp(log_tail - self.log_norm)
        return out

    @cached_property
    def _sampling_grid(self) -> np.ndarray:
        if self.k_max is not None:
            _, cdf = self.cdf_grid(self.k_max - 1)
            return cdf / cdf[-1]
        size = _GRID_START
        while True:
            _, cdf = self.cdf_grid(self.k_min - 2 + size)
            if cdf[-1] >= 1 - 1e-10 or size >= _GRID_MAX:
                return cdf
            size *= 2

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``size`` in-degrees by inverting the cumulative distribution.

        Draws beyond the tabulated range fall back to a continuous approximation of the tail.
        """
        cdf = self._sampling_grid
        u = rng.random(size)
        index = np.searchsorted(cdf, u, side="right")
        x = (self.k_min + index).astype(np.float64)
        beyond = index >= cdf.size
        if beyond.any():
            rest = max(1.0 - float(cdf[-1]), np.finfo(float).tiny)
            v = np.clip((u[beyond] - cdf[-1]) / rest, 0.0, 1.0 - 1e-16)
            x[beyond] = self.distribution.tail_quantile(self.values, self.k_min + cdf.size, v)
        return x.astype(np.int64) - 1

    def describe(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "parameters": self.params,
            "k_min": self.k_min,
            "k_max": self.k_max,
        }


@dataclass(frozen=True)
class TailFit:
    model: DistributionModel
    ks_stat: float
    log_likelihood: float
    n_tail: int
    n_total: int
    p_value: float | None = None
    n_bootstrap: int | None = None
    seed: int | None = None
    note: str | None = None
    scan: tuple[tuple[float, ...], ...] = field(default=(), compare=False)
    diagnostics: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def family(self) -> str:
        return self.model.family

    @property
    def k_min(self) -> int:
        return self.model.k_min

    @property
    def k_max(self) -> int | None:
        return self.model.k_max

    @property
    def params(self) -> dict[str, float]:
        return self.model.params

    def plausible(self, level: float = PLAUSIBILITY_LEVEL) -> bool | None:
        return None if self.p_value is None else self.p_value >= level

    def to_json(self) -> dict[str, Any]:
        return {
            **self.model.describe(),
            "ks_stat": self.ks_stat,
            "p_value": self.p_value,
            "log_likelihood": self.log_likelihood,
            "n_tail": self.n_tail,
            "n_total": self.n_total,
            "seed": self.seed,
            "n_bootstrap": self.n_bootstrap,
            "note": self.note,
            "scan": [list(row) for row in self.scan],
        }


def _restrict(x: np.ndarray, k_min: int, k_max: int | None) -> np.ndarray:
    mask = x >= k_min
    if k_max is not None:
        mask &= x <= k_max
    return x[mask]


def ks_statistic(model: DistributionModel, degrees: Degrees) -> float:
    """Largest distance between the empirical and the model CDF over the support.

    Only the degrees inside the model's support are compared.
    """
    k = _degrees(degrees)
    k = k[model.in_support(k)]
    if not k.size:
        raise FitError("No data points inside the model support")
    grid, model_cdf = model.cdf_grid(int(k.max()))
    empirical = np.searchsorted(np.sort(k), grid, side="right") / k.size
    return float(np.max(np.abs(empirical - model_cdf)))


def _optimize(
    family: distributions.Family, x: np.ndarray, k_min: int, k_max: int | None
) -> tuple[tuple[float, ...], float]:
    xs, counts = np.unique(x, return_counts=True)
    n = x.size

    def cost(theta: Sequence[float]) -> float:
        if not family.in_bounds(theta):
            return np.inf
        ll = float(counts @ family.log_density(xs, theta)) - n * family.log_normalizer(
            theta, k_min, k_max
        )
        return -ll / n if math.isfinite(ll) else np.inf

    if len(family.parameters) == 1:
        result = minimize_scalar(
            lambda value: cost((value,)),
            bounds=family.bounds[0],
            method="bounded",
            options={"xatol": 1e-10, "maxiter": 1000},
        )
        if not result.success or not math.isfinite(result.fun):
            raise ConvergenceError(
                f"Fitting '{family.name}' did not converge: {result.message}",
                {"nfev": result.nfev, "x": float(result.x)},
            )
        return (float(result.x),), -result.fun * n

    best = None
    attempts = []
    for start in family.initial_guesses(x, k_min):
        start = tuple(min(max(v, lo), hi) for v, (lo, hi) in zip(start, family.bounds))
        result = minimize(
            cost,
            np.array(start),
            method="Nelder-Mead",
            bounds=family.bounds,
            options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 5000, "maxfev": 10000},
        )
        attempts.append({"start": start, "fun": float(result.fun), "success": bool(result.success)})
        if result.success and math.isfinite(result.fun) and (best is None or result.fun < best.fun):
            best = result
    if best is None:
        raise ConvergenceError(f"Fitting '{family.name}' did not converge", {"attempts": attempts})
    return tuple(float(v) for v in best.x), -best.fun * n


def _fit(
    x_all: np.ndarray,
    family: str | distributions.Family,
    k_min: int,
    k_max: int | None,
    min_tail: int,
) -> TailFit:
    if isinstance(family, str):
        family = distributions.get(family)
    x = _restrict(x_all, k_min, k_max)
    if x.size < min_tail:
        raise FitError(f"Only {x.size} data points with k + 1 >= {k_min}, need {min_tail}")
    if np.unique(x).size < 2:
        raise FitError(f"All {x.size} data points share the value k + 1 = {x[0]}")
    values, log_likelihood = _optimize(family, x, k_min, k_max)
    model = DistributionModel(family.name, values, k_min, k_max)
    ks = ks_statistic(model, x - 1)
    logger.debug("Fitted %s at k_min=%d: %s (KS=%.5f)", family.name, k_min, values, ks)
    return TailFit(model, ks, log_likelihood, int(x.size), int(x_all.size))


def fit_mle(
    hist: Degrees,
    family: str,
    k_min: int = 1,
    k_max: int | None = None,
    min_tail: int = MIN_TAIL,
) -> TailFit:
    """Fit ``family`` by maximum likelihood to the degrees with ``k_min <= k + 1 <= k_max``.

    Raises:
        FitError: If fewer than ``min_tail`` points remain or they share a single value.
        ConvergenceError: If the likelihood search does not converge.
    """
    if k_min < 1:
        raise ConfigurationError(f"k_min must be at least 1, got {k_min}")
    return _fit(_degrees(hist) + 1, family, k_min, k_max, min_tail)


def _candidates(x: np.ndarray, k_max: int | None, min_tail: int) -> list[int]:
    values = np.unique(_restrict(x, 1, k_max))
    tail_sizes = x.size - np.searchsorted(np.sort(x), values, side="left")
    if k_max is not None:
        tail_sizes -= int((x > k_max).sum())
    return [int(v) for v, size in zip(values, tail_sizes) if size >= min_tail]


def _select_by_ks(
    x: np.ndarray,
    family: str,
    candidates: Sequence[int] | None,
    k_max: int | None,
    min_tail: int,
) -> TailFit:
    best = None
    scan = []
    for k_min in candidates if candidates is not None else _candidates(x, k_max, min_tail):
        try:
            fit = _fit(x, family, k_min, k_max, min_tail)
        except FitError as e:
            logger.debug("Skipping k_min=%d: %s", k_min, e)
            continue
        scan.append((k_min, fit.ks_stat))
        if best is None or fit.ks_stat < best.ks_stat:
            best = fit
    if best is None:
        raise FitError(f"No candidate k_min leaves {min_tail} points for '{family}'")
    return replace(best, scan=tuple(scan))


def select_kmin(
    hist: Degrees,
    family: str,
    criterion: str | KminCriterion = KminCriterion.KS,
    candidates: Sequence[int] | None = None,
    k_max: int | None = None,
    min_tail: int = MIN_TAIL,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    threads: int = 1,
    level: float = PLAUSIBILITY_LEVEL,
) -> TailFit:
    """Choose the lower cutoff ``k_min`` for ``family``.

    With the ``ks`` criterion every candidate is fitted and the one with the smallest KS distance
    wins. With ``plausible`` the candidates are tried in increasing order and the first whose
    bootstrap p-value reaches ``level`` is returned. The fit records the scanned candidates in
    :attr:`TailFit.scan`.

    Args:
        hist (DegreeHistogram | Sequence[int]): The observed in-degrees.
        family (str): Name of the distribution family.
        criterion (str | KminCriterion): ``ks`` (default) or ``plausible``.
        candidates (Sequence[int] | None): Cutoffs to try, by default every observed ``k + 1``
            that leaves at least ``min_tail`` points.
        k_max (int | None): Optional upper bound of the support.
        min_tail (int): Smallest tail size that is fitted.
        n_bootstrap (int): Bootstrap replicates per candidate for ``plausible``.
        seed (int): Bootstrap seed for ``plausible``.
        threads (int): Bootstrap worker threads for ``plausible``.
        level (float): Significance level for ``plausible``.

    Raises:
        FitError: If no candidate can be fitted or none is plausible.
    """
    criterion = KminCriterion(criterion)
    x = _degrees(hist) + 1
    if criterion is KminCriterion.KS:
        fit = _select_by_ks(x, family, candidates, k_max, min_tail)
        logger.info("Selected k_min=%d for %s (KS=%.5f)", fit.k_min, fit.family, fit.ks_stat)
        return fit

    scan = []
    for k_min in candidates if candidates is not None else _candidates(x, k_max, min_tail):
        try:
            fit = _fit(x, family, k_min, k_max, min_tail)
        except FitError as e:
            logger.debug("Skipping k_min=%d: %s", k_min, e)
            continue
        tested = gof_test(x - 1, fit, n_bootstrap, seed, threads, min_tail=min_tail)
        scan.append((k_min, tested.ks_stat, tested.p_value))
        if tested.p_value is not None and tested.p_value >= level:
            logger.info(
                "Smallest plausible k_min=%d for %s (p=%.3f)", k_min, family, tested.p_value
            )
            return replace(tested, scan=tuple(scan))
    raise FitError(f"No plausible k_min for '{family}' at level {level}")


def gof_test(
    hist: Degrees,
    fit: TailFit,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    threads: int = 1,
    reselect_kmin: bool = False,
    min_tail: int = MIN_TAIL,
) -> TailFit:
    """Semi-parametric bootstrap p-value of a tail fit.

    Each replicate keeps the sample size, draws the number of tail points from a binomial, samples
    those from the fitted model and resamples the rest from the observed body. The replicate is
    refitted at the same ``k_min`` (or with a fresh KS cutoff search when ``reselect_kmin``) and the
    p-value is the share of replicates whose KS distance exceeds the observed one. Replicate ``i``
    draws from its own generator seeded with ``(seed, i)``, so the result does not depend on
    ``threads``.
    """
    if fit.k_max is not None:
        logger.warning("Body fit of %s has no goodness-of-fit test", fit.family)
        return replace(fit, p_value=None, note=BODY_NOTE)
    if n_bootstrap < 1:
        raise ConfigurationError(f"Invalid number of bootstrap replicates {n_bootstrap}")
    note = None
    if n_bootstrap < LOW_BOOTSTRAP:
        note = f"only {n_bootstrap} bootstrap replicates, the p-value is coarse"
        logger.warning("Bootstrap with %d replicates gives a coarse p-value", n_bootstrap)

    x = _degrees(hist) + 1
    body = x[x < fit.k_min]
    n = x.size
    tail_share = fit.n_tail / n

    def replicate(i: int) -> float | None:
        rng = np.random.default_rng([seed, i])
        n_tail = int(rng.binomial(n, tail_share)) if body.size else n
        synthetic = np.concatenate(
            [fit.model.sample(n_tail, rng) + 1, rng.choice(body, size=n - n_tail)]
            if body.size
            else [fit.model.sample(n_tail, rng) + 1]
        )
        try:
            if reselect_kmin:
                return _select_by_ks(synthetic, fit.family, None, None, min_tail).ks_stat
            return _fit(synthetic, fit.family, fit.k_min, None, min_tail).ks_stat
        except FitError:
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(replicate, range(n_bootstrap)))
    else:
        stats = [replicate(i) for i in range(n_bootstrap)]
    valid = [s for s in stats if s is not None]
    if not valid:
        raise FitError(f"None of the {n_bootstrap} bootstrap replicates could be refitted")
    p_value = sum(1 for s in valid if s > fit.ks_stat) / len(valid)
    logger.info("Bootstrap p=%.3f for %s at k_min=%d", p_value, fit.family, fit.k_min)
    return replace(
        fit,
        p_value=p_value,
        n_bootstrap=n_bootstrap,
        seed=seed,
        note=note,
        diagnostics={**fit.diagnostics, "failed_replicates": n_bootstrap - len(valid)},
    )


@dataclass(frozen=True)
class LikelihoodRatio:
    """Log-likelihood ratio ``R`` of ``first`` against ``second`` with its two-sided p-value."""

    first: str
    second: str
    ratio: float
    normalized: float
    p_value: float

    @property
    def tie(self) -> bool:
        return self.ratio == 0

    @property
    def preferred(self) -> str | None:
        if self.tie:
            return None
        return self.first if self.ratio > 0 else self.second

    def to_json(self) -> dict[str, Any]:
        return {
            "first": self.first,
            "second": self.second,
            "ratio": self.ratio,
            "normalized": self.normalized,
            "p_value": self.p_value,
            "preferred": self.preferred,
        }


@dataclass(frozen=True)
class FamilyComparison:
    ranking: tuple[TailFit, ...]
    ratios: tuple[LikelihoodRatio, ...]

    @property
    def winner(self) -> str | None:
        """The top ranked family, or None if it ties with the runner-up."""
        first, *rest = self.ranking
        if rest and first.log_likelihood == rest[0].log_likelihood:
            return None
        return first.family

    def to_json(self) -> dict[str, Any]:
        return {
            "ranking": [
                {"family": fit.family, "log_likelihood": fit.log_likelihood} for fit in self.ranking
            ],
            "ratios": [ratio.to_json() for ratio in self.ratios],
            "winner": self.winner,
        }


def likelihood_ratio(first: TailFit, second: TailFit, degrees: Degrees) -> LikelihoodRatio:
    k = _degrees(degrees)
    k = k[first.model.in_support(k)]
    pointwise = first.model.log_pmf(k) - second.model.log_pmf(k)
    ratio = float(pointwise.sum())
    sigma = float(pointwise.std())
    if sigma > 0:
        normalized = ratio / (math.sqrt(k.size) * sigma)
        p_value = float(erfc(abs(ratio) / (math.sqrt(2 * k.size) * sigma)))
    else:
        normalized = 0.0 if ratio == 0 else math.copysign(math.inf, ratio)
        p_value = 1.0 if ratio == 0 else 0.0
    return LikelihoodRatio(first.family, second.family, ratio, normalized, p_value)


def compare_families(hist: Degrees, fits: Sequence[TailFit]) -> FamilyComparison:
    """Rank fits on a common support by log-likelihood, annotating every pair with its ratio.

    Raises:
        FitError: If fewer than two fits are given.
        MismatchedSupport: If the fits differ in support or were made on other data.
    """
    if len(fits) < 2:
        raise FitError("Comparing families needs at least two fits")
    supports = {(fit.k_min, fit.k_max) for fit in fits}
    if len(supports) > 1:
        raise MismatchedSupport(f"Fits have different supports {sorted(supports, key=str)}")
    degrees = _degrees(hist)
    n_tail = int(fits[0].model.in_support(degrees).sum())
    for fit in fits:
        if (fit.n_tail, fit.n_total) != (n_tail, degrees.size):
            raise MismatchedSupport(
                f"The {fit.family} fit covers {fit.n_tail} of {fit.n_total} points, the data has "
                f"{n_tail} of {degrees.size}"
            )
    ranking = tuple(sorted(fits, key=lambda fit: -fit.log_likelihood))
    ratios = tuple(
        likelihood_ratio(first, second, degrees)
        for i, first in enumerate(ranking)
        for second in ranking[i + 1 :]
    )
    return FamilyComparison(ranking, ratios)


def cumulative(hist: DegreeHistogram) -> list[tuple[int, float]]:
    """Share ``C(k)`` of nodes with in-degree at least ``k`` for every ``k`` from min to max.

    Examples:

        >>> cumulative(DegreeHistogram({0: 2, 1: 1, 3: 1}))
        [(0, 1.0), (1, 0.5), (2, 0.25), (3, 0.25)]
    """
    ks, ns = hist.arrays()
    if not ks.size:
        raise ShapeError("The cumulative distribution of an empty histogram is undefined")
    counts = np.zeros(int(ks[-1] - ks[0]) + 1, dtype=np.int64)
    counts[ks - ks[0]] = ns
    at_least = counts[::-1].cumsum()[::-1]
    return [(int(ks[0]) + i, float(c / hist.total_nodes)) for i, c in enumerate(at_least)]


@dataclass(frozen=True)
class LogNormalFormCurve:
    """Descriptive cumulative form ``L(k) = b0 exp(-b1 ln k - b2 ln^2 k)``."""

    beta0: float
    beta1: float
    beta2: float

    def evaluate(self, k: Sequence[float] | np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=np.float64)
        if np.any(k < 1):
            raise DomainError("The log-normal form is only defined for k >= 1")
        log_k = np.log(k)
        return self.beta0 * np.exp(-self.beta1 * log_k - self.beta2 * log_k**2)


CITATION_LCURVE = LogNormalFormCurve(0.15, 0.40, 0.16)


def eval_lcurve(params: LogNormalFormCurve, k: float) -> float:
    """Evaluate the log-normal form at a single ``k >= 1``.

    Examples:

        >>> eval_lcurve(LogNormalFormCurve(0.15, 0.40, 0.16), 1)
        0.15
        >>> eval_lcurve(LogNormalFormCurve(1.0, 0.0, 0.0), 250)
        1.0
    """
    if k < 1:
        raise DomainError(f"The log-normal form is only defined for k >= 1, got {k}")
    log_k = math.log(k)
    return params.beta0 * math.exp(-params.beta1 * log_k - params.beta2 * log_k**2)


def overlay_grid(k_last: int, points: int = 50) -> np.ndarray:
    """Log-spaced distinct in-degrees from 0 to ``k_last``."""
    grid = np.rint(np.logspace(0, math.log10(k_last + 1), points)) - 1
    return np.unique(grid.astype(np.int64))


def model_cumulative(fit: TailFit, ks: Sequence[int] | np.ndarray) -> np.ndarray:
    """The fitted model on the scale of the data's cumulative distribution.

    Degrees below the fitted support are NaN.
    """
    ks = np.asarray(ks, dtype=np.int64)
    values = fit.n_tail / fit.n_total * fit.model.survival(ks)
    return np.where(ks + 1 >= fit.k_min, values, np.nan)


def sample(
    family: str,
    params: Mapping[str, float] | Sequence[float],
    k_min: int,
    size: int,
    rng: np.random.Generator,
    k_max: int | None = None,
) -> np.ndarray:
    """Draw in-degrees from a discretised family.

    Examples:

        >>> degrees = sample("power_law", {"gamma": 2.5}, 1, 5, np.random.default_rng(1))
        >>> degrees.shape, bool((degrees >= 0).all())
        ((5,), True)
    """
    if isinstance(params, Mapping):
        names = distributions.get(family).parameters
        try:
            params = [params[name] for name in names]
        except KeyError as e:
            raise ConfigurationError(f"Missing parameter {e} for '{family}'") from e
    return DistributionModel(family, tuple(params), k_min, k_max).sample(size, rng)


def write_fit(fit: TailFit, path: common.PathLike) -> Path:
    return common.write_json(path, fit.to_json())


def write_cumulative(points: Sequence[tuple[int, float]], path: common.PathLike) -> Path:
    return common.write_csv(path, ["k", "c_k"], points)


def write_overlay(
    hist: DegreeHistogram,
    fits: Sequence[TailFit],
    path: common.PathLike,
    points: int = 50,
    lcurve: LogNormalFormCurve | None = None,
) -> Path:
    """Data and fitted cumulatives on a log-spaced grid, one column per fit."""
    data = dict(cumulative(hist))
    ks = overlay_grid(max(data), points)
    columns = [model_cumulative(fit, ks) for fit in fits]
    header = ["k", "c_k", *(f"c_{fit.family}" for fit in fits)]
    if lcurve is not None:
        header.append("l_k")
    rows = []
    for i, k in enumerate(ks):
        row: list[Any] = [int(k), data.get(int(k), "")]
        row.extend("" if np.isnan(column[i]) else float(column[i]) for column in columns)
        if lcurve is not None:
            row.append(eval_lcurve(lcurve, k) if k >= 1 else "")
        rows.append(row)
    return common.write_csv(path, header, rows)
