"""Fitting attachment functions to measured attachment rates.

Fits are least squares in log space: ``log Â(k) = log c + log A(k; theta)`` with one weight per
bin. Models are compared by AIC and BIC computed from the residual sum of squares.

The log-linearity score summarises how far a rate is straight on double logarithmic axes: a
continuous piecewise-linear fit in ``(log10 k, log10 Â)`` is grown by greedy knot insertion, the
model with the smallest generalised cross-validation error is kept, and the score is the common
logarithm of the k range spanned by its longest segment.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import Any

import numpy as np
from scipy.optimize import OptimizeWarning
from scipy.optimize import curve_fit

from prefattach import attachment
from prefattach import common
from prefattach.exceptions import ConfigurationError
from prefattach.exceptions import ConvergenceError
from prefattach.exceptions import FitError
from prefattach.exceptions import MismatchedSupport
from prefattach.rate import BinnedRate


logger = logging.getLogger(__name__)

MIN_POINTS = 3
MAX_SEGMENTS = 5
GCV_PENALTY = 3.0

_TOLERANCE = 1e-15
_STARTS = (1.0, 0.1, 10.0)


def rss(data: np.ndarray, model: np.ndarray) -> float:
    return float(np.sum((data - model) ** 2))


def aic(rss: float, p: int, n: int) -> float:
    return n * math.log(max(rss, np.finfo(float).tiny) / n) + 2 * p


def bic(rss: float, p: int, n: int) -> float:
    return n * math.log(max(rss, np.finfo(float).tiny) / n) + p * math.log(n)


def akaike_weights(aic_values: Sequence[float]) -> np.ndarray:
    """Relative likelihoods of a set of models derived from their AIC values."""
    delta = np.asarray(aic_values, dtype=np.float64) - np.min(aic_values)
    relative = np.exp(-0.5 * delta)
    return relative / relative.sum()


@dataclass(frozen=True)
class AttachmentFunctionFit:
    """A fitted attachment function ``c * A(k; theta)`` with its information criteria."""

    function: attachment.AttachmentFunction
    scale: float
    rss: float
    aic: float
    bic: float
    n_points: int
    data_key: str = field(repr=False)
    config: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def family(self) -> str:
        return self.function.name

    @property
    def shape(self) -> float:
        """The fitted shape parameter, NaN for families without one."""
        return math.nan if self.function.value is None else self.function.value

    @property
    def n_parameters(self) -> int:
        return 1 if self.function.parameter is None else 2

    def predict(self, k: Sequence[int] | np.ndarray) -> np.ndarray:
        return self.scale * self.function.evaluate(np.asarray(k))

    def to_json(self) -> dict[str, Any]:
        parameters: dict[str, float] = {"scale": self.scale}
        if self.function.parameter is not None:
            parameters[self.function.parameter] = self.shape
        return {
            "family": self.family,
            "parameters": parameters,
            "rss": self.rss,
            "aic": self.aic,
            "bic": self.bic,
            "n_points": self.n_points,
            "bins": self.config,
        }


def _fit_points(
    binned: BinnedRate, min_support: int, min_exposure: float = 0.0
) -> tuple[np.ndarray, np.ndarray]:
    k, a_hat, support = binned.arrays()
    usable = (support >= min_support) & (k >= 0)
    if min_exposure > 0:
        usable &= binned.exposures() >= min_exposure
    non_positive = int((usable & (a_hat <= 0)).sum())
    if non_positive:
        logger.warning("Excluding %d bins with a non-positive attachment rate", non_positive)
    usable &= a_hat > 0
    if usable.sum() < MIN_POINTS:
        raise FitError(
            f"Only {int(usable.sum())} usable bins, at least {MIN_POINTS} are needed for a fit"
        )
    return k[usable], a_hat[usable]


def fit_af(
    binned: BinnedRate,
    family: str,
    min_support: int = 1,
    min_exposure: float = 0.0,
) -> AttachmentFunctionFit:
    """Fit an attachment function family to a binned rate.

    The scale is a free parameter, so the shape is unaffected by the normalisation of the
    measured rate.

    Args:
        binned (BinnedRate): The (binned) attachment rate.
        family (str): A registered attachment function, e.g. ``log_linear`` or ``nonlinear``.
        min_support (int): Bins backed by fewer observed edges are left out.
        min_exposure (float): Bins whose degrees spent fewer node-steps at risk on average are
            left out. In the superlinear regime a single node absorbs almost every edge and
            passes through each large degree once; those degrees carry the changing normalizing
            sum rather than A(k) and are excluded this way.

    Raises:
        FitError: If fewer than three bins with a positive rate remain.
        ConvergenceError: If the least squares search fails.

    Examples:

        >>> k = np.arange(50)
        >>> fit = fit_af(BinnedRate.from_arrays(k, 2.0 * (k + 1.0) ** 0.7), "log_linear")
        >>> round(fit.shape, 9), round(fit.scale, 9)
        (0.7, 2.0)
    """
    try:
        function_cls = attachment.functions[family]
    except KeyError as e:
        raise ConfigurationError(f"Unknown attachment function '{family}'") from e
    k, a_hat = _fit_points(binned, min_support, min_exposure)
    y = np.log(a_hat)
    n = int(k.size)

    if function_cls.parameter is None:
        function = function_cls()
        log_scale = float(np.mean(y - function.log_evaluate(k)))
    else:
        function, log_scale = _least_squares(function_cls, k, y)

    residual_sum = rss(y, log_scale + function.log_evaluate(k))
    p = 1 if function.parameter is None else 2
    fit = AttachmentFunctionFit(
        function=function,
        scale=math.exp(log_scale),
        rss=residual_sum,
        aic=aic(residual_sum, p, n),
        bic=bic(residual_sum, p, n),
        n_points=n,
        data_key=common.fingerprint(k, a_hat),
        config={
            "min_support": min_support,
            "min_exposure": min_exposure,
            "half_width": binned.half_width,
        },
    )
    logger.info("Fitted %r to %d bins: AIC=%.2f BIC=%.2f", function, n, fit.aic, fit.bic)
    return fit


def _least_squares(
    function_cls: type[attachment.AttachmentFunction], k: np.ndarray, y: np.ndarray
) -> tuple[attachment.AttachmentFunction, float]:
    assert function_cls.bounds is not None
    lo, hi = function_cls.bounds

    def model(x: np.ndarray, log_scale: float, shape: float) -> np.ndarray:
        return log_scale + function_cls(shape).log_evaluate(x)

    best = None
    for start in _STARTS:
        shape = min(max(start, lo + 1e-6), hi - 1e-6)
        log_scale = float(np.mean(y - function_cls(shape).log_evaluate(k)))
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", OptimizeWarning)
                params, _ = curve_fit(
                    model,
                    k.astype(np.float64),
                    y,
                    p0=(log_scale, shape),
                    bounds=((-np.inf, lo), (np.inf, hi)),
                    ftol=_TOLERANCE,
                    xtol=_TOLERANCE,
                    gtol=_TOLERANCE,
                    max_nfev=2000,
                )
        except (RuntimeError, ValueError) as e:
            logger.debug("Least squares from %s=%s failed: %s", function_cls.parameter, start, e)
            continue
        cost = rss(y, model(k, *params))
        if best is None or cost < best[0]:
            best = (cost, params)
    if best is None:
        raise ConvergenceError(
            f"Fitting '{function_cls.name}' did not converge from any starting point",
            {"starts": list(_STARTS)},
        )
    log_scale, shape = best[1]
    return function_cls(float(shape)), float(log_scale)


def ols_log_linear(
    k: Sequence[int] | np.ndarray, a_hat: Sequence[float] | np.ndarray
) -> tuple[float, float]:
    """Closed-form least squares of ``log Â`` on ``log(k + 1)``, returning ``(alpha, c)``."""
    x = np.log1p(np.asarray(k, dtype=np.float64))
    y = np.log(np.asarray(a_hat, dtype=np.float64))
    dx = x - x.mean()
    alpha = float(dx @ (y - y.mean()) / (dx @ dx))
    return alpha, math.exp(float(y.mean() - alpha * x.mean()))


@dataclass(frozen=True)
class AttachmentComparison:
    ranking: tuple[AttachmentFunctionFit, ...]
    weights: tuple[float, ...]

    @property
    def winner(self) -> str:
        return self.ranking[0].family

    @property
    def bic_winner(self) -> str:
        return min(self.ranking, key=lambda fit: fit.bic).family

    def to_json(self) -> dict[str, Any]:
        best = self.ranking[0]
        return {
            "ranking": [
                {
                    "family": fit.family,
                    "aic": fit.aic,
                    "bic": fit.bic,
                    "delta_aic": fit.aic - best.aic,
                    "akaike_weight": weight,
                }
                for fit, weight in zip(self.ranking, self.weights)
            ],
            "winner": self.winner,
            "bic_winner": self.bic_winner,
        }


def compare_af(fits: Sequence[AttachmentFunctionFit]) -> AttachmentComparison:
    """Rank fits of the same data by AIC.

    Raises:
        MismatchedSupport: If the fits were made on different bins.
    """
    if not fits:
        raise FitError("Nothing to compare")
    keys = {fit.data_key for fit in fits}
    if len(keys) > 1:
        raise MismatchedSupport("Attachment function fits were made on different data")
    ranking = tuple(sorted(fits, key=lambda fit: fit.aic))
    weights = tuple(float(w) for w in akaike_weights([fit.aic for fit in ranking]))
    return AttachmentComparison(ranking, weights)


@dataclass(frozen=True)
class Segment:
    """A straight piece of the segmented fit, ``log10 Â = intercept + slope * log10 k``."""

    start_k: int
    end_k: int
    slope: float
    intercept: float

    @property
    def k_extent(self) -> int:
        return self.end_k - self.start_k

    @property
    def log_extent(self) -> float:
        return math.log10(self.end_k) - math.log10(self.start_k)

    def to_json(self) -> dict[str, Any]:
        return {
            "start_k": self.start_k,
            "end_k": self.end_k,
            "slope": self.slope,
            "intercept": self.intercept,
        }


@dataclass(frozen=True)
class LogLinearityScore:
    segments: tuple[Segment, ...]
    score: float
    log_extent: float
    gcv: float
    n_points: int
    max_segments: int
    penalty: float

    @property
    def breakpoints(self) -> tuple[int, ...]:
        return tuple(segment.end_k for segment in self.segments[:-1])

    @property
    def longest(self) -> Segment:
        return max(self.segments, key=lambda segment: segment.k_extent)

    def to_json(self) -> dict[str, Any]:
        return {
            "score": self.score,
            "log_extent": self.log_extent,
            "breakpoints": list(self.breakpoints),
            "slopes": [segment.slope for segment in self.segments],
            "segments": [segment.to_json() for segment in self.segments],
            "gcv": self.gcv,
            "n_points": self.n_points,
            "max_segments": self.max_segments,
            "penalty": self.penalty,
        }


def _hinge_design(x: np.ndarray, knots: Sequence[float]) -> np.ndarray:
    columns = [np.ones_like(x), x, *(np.maximum(x - knot, 0.0) for knot in knots)]
    return np.column_stack(columns)


def _hinge_fit(x: np.ndarray, y: np.ndarray, knots: Sequence[float]) -> tuple[np.ndarray, float]:
    coefficients = np.linalg.lstsq(_hinge_design(x, knots), y, rcond=None)[0]
    return coefficients, rss(y, _hinge_design(x, knots) @ coefficients)


def _gcv(residual_sum: float, n: int, n_knots: int, penalty: float) -> float:
    complexity = 2 + n_knots + penalty * n_knots
    if complexity >= n:
        return math.inf
    return residual_sum / n / (1 - complexity / n) ** 2


def loglinearity_score(
    binned: BinnedRate,
    max_segments: int = MAX_SEGMENTS,
    penalty: float = GCV_PENALTY,
    min_support: int = 1,
    min_exposure: float = 0.0,
) -> LogLinearityScore:
    """Segmented regression of the rate in ``(log10 k, log10 Â)`` and its log-linearity score.

    Knots are restricted to observed bins and added greedily, each time the one that lowers the
    residual sum of squares most, up to ``max_segments - 1`` knots. Among the nested models the
    one with the smallest generalised cross-validation error wins, where every knot costs
    ``1 + penalty`` effective parameters.

    Raises:
        FitError: If fewer than ``2 * max_segments`` bins with ``k > 0`` and a positive rate remain.
    """
    if max_segments < 1:
        raise ConfigurationError(f"Invalid number of segments {max_segments}")
    k, a_hat = _fit_points(binned, min_support, min_exposure)
    positive = k > 0
    k, a_hat = k[positive], a_hat[positive]
    n = int(k.size)
    if n < 2 * max_segments:
        raise FitError(f"Only {n} bins for up to {max_segments} segments, need {2 * max_segments}")
    x = np.log10(k.astype(np.float64))
    y = np.log10(a_hat)

    knots: list[int] = []
    coefficients, residual_sum = _hinge_fit(x, y, [])
    best = (_gcv(residual_sum, n, 0, penalty), [], coefficients)
    candidates = set(range(1, n - 1))
    while len(knots) < max_segments - 1 and candidates and residual_sum > 1e-24 * n:
        trials = []
        for index in sorted(candidates):
            trial = sorted([*knots, index])
            trial_coefficients, trial_rss = _hinge_fit(x, y, [x[i] for i in trial])
            trials.append((trial_rss, index, trial, trial_coefficients))
        residual_sum, index, knots, coefficients = min(trials, key=lambda trial: trial[:2])
        candidates.discard(index)
        score = _gcv(residual_sum, n, len(knots), penalty)
        if score < best[0]:
            best = (score, knots, coefficients)

    gcv, chosen, coefficients = best
    bounds = [0, *chosen, n - 1]
    slope = float(coefficients[1])
    intercept = float(coefficients[0])
    segments = []
    for j, (start, end) in enumerate(zip(bounds, bounds[1:])):
        if j > 0:
            knot = x[chosen[j - 1]]
            slope += float(coefficients[1 + j])
            intercept -= float(coefficients[1 + j]) * knot
        segments.append(Segment(int(k[start]), int(k[end]), slope, intercept))
    longest = max(segments, key=lambda segment: segment.k_extent)
    result = LogLinearityScore(
        segments=tuple(segments),
        score=math.log10(longest.k_extent) if longest.k_extent > 0 else -math.inf,
        log_extent=max(segment.log_extent for segment in segments),
        gcv=gcv,
        n_points=n,
        max_segments=max_segments,
        penalty=penalty,
    )
    logger.info("Log-linearity score %.4f with %d segments", result.score, len(segments))
    return result


def write_fit(fit: AttachmentFunctionFit, path: common.PathLike) -> Path:
    return common.write_json(path, fit.to_json())


def write_score(score: LogLinearityScore, path: common.PathLike) -> Path:
    return common.write_json(path, score.to_json())


def write_overlay(
    binned: BinnedRate, fits: Sequence[AttachmentFunctionFit], path: common.PathLike
) -> Path:
    """The binned rate with every fitted attachment function evaluated on the bin grid."""
    k, a_hat, _ = binned.arrays()
    predictions = [fit.predict(k) for fit in fits]
    rows = (
        [int(ki), float(ai), *(float(column[i]) for column in predictions)]
        for i, (ki, ai) in enumerate(zip(k, a_hat))
    )
    return common.write_csv(path, ["k", "a_hat_binned", *(f"a_{fit.family}" for fit in fits)], rows)
