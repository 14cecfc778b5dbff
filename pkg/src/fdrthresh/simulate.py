"""Monte Carlo sampling of mixture datasets and thresholding risks.

Datasets are drawn coordinatewise: labels are i.i.d. Bernoulli(pi1), null
statistics follow the Subbotin shape, and alternatives are produced by
shifting (location) or stretching (scale) the same null draws, which
realizes the correct conditional law without a second stream.  Statistics
standardize to p-values through the one- or two-sided null tail, so null
p-values are exactly uniform.

Replicates are generated in fixed-size chunks, each chunk seeded by the
pair ``(seed, first replicate index)`` through a counter-based generator,
so results are bit-identical for a given configuration regardless of how
many chunks run or in what order they are aggregated.

The transductive risk averages the in-sample misclassification fraction;
the inductive risk averages ``R(t_hat)``, the deterministic risk of the
realized threshold at a fresh observation.  The two coincide in
expectation for any deterministic threshold rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DomainError
from .model import Kind, ModelSpec
from .risk import risk_det
from .threshold import bfdr_threshold, pvalues_from_stats

__all__ = [
    "ConcentrationProfile",
    "McEstimate",
    "RiskKind",
    "SimConfig",
    "concentration_profile",
    "empirical_fdp",
    "fdr_rule",
    "mc_risk",
    "sample_dataset",
]

CHUNK = 8192


class RiskKind(Enum):
    TRANSDUCTIVE = "transductive"
    INDUCTIVE = "inductive"


def _as_risk_kind(value) -> RiskKind:
    if isinstance(value, RiskKind):
        return value
    try:
        return RiskKind(str(value).lower())
    except ValueError:
        raise DomainError(f"unknown risk kind {value!r}") from None


@dataclass(frozen=True)
class SimConfig:
    """A reproducible simulation request.

    Parameters
    ----------
    model : ModelSpec
        Mixture model to draw from.
    m : int
        Observations per replicate.
    replicates : int
        Number of independent datasets.
    seed : int
        Base seed; every derived stream is keyed by ``(seed, replicate
        chunk)``, so runs are deterministic.
    risk_kind : RiskKind
        Which risk :func:`mc_risk` estimates.
    """

    model: ModelSpec
    m: int
    replicates: int
    seed: int
    risk_kind: RiskKind = RiskKind.INDUCTIVE

    def __post_init__(self):
        if not isinstance(self.model, ModelSpec):
            raise DomainError("model must be a ModelSpec")
        for name in ("m", "replicates"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be an integer >= 1, got {v!r}")
            object.__setattr__(self, name, int(v))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "risk_kind", _as_risk_kind(self.risk_kind))


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    se: float
    replicates: int


@dataclass(frozen=True)
class ConcentrationProfile:
    """Empirical spread of the FDR threshold against its references."""

    quantile_05: float
    median: float
    quantile_95: float
    bfdr_reference: float
    floor_reference: float


def _chunk_rng(seed: int, start: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, start])


def _chunks(total: int):
    for start in range(0, total, CHUNK):
        yield start, min(CHUNK, total - start)


def _null_statistics(shape, rng, size) -> np.ndarray:
    z = shape.zeta
    if z == 2.0:
        return rng.standard_normal(size)
    if z == 1.0:
        sign = 1.0 - 2.0 * rng.integers(0, 2, size=size).astype(float)
        return sign * rng.standard_exponential(size)
    u = rng.random(size)
    u[u == 0.0] = 0.5**53  # the generator's grid is [0, 1)
    return shape.quantile(u)


def _sample_chunk(config: SimConfig, start: int, size: int):
    model = config.model
    rng = _chunk_rng(config.seed, start)
    labels = rng.random((size, config.m)) < model.pi1
    stats = _null_statistics(model.shape, rng, (size, config.m))
    if model.kind is Kind.LOCATION:
        stats = stats + model.effect * labels
    else:
        stats = stats * np.where(labels, model.effect, 1.0)
    pvalues = pvalues_from_stats(model.kind, model.shape, stats)
    return labels, stats, pvalues


def sample_dataset(config: SimConfig):
    """Draw all replicates; returns ``(labels, statistics, pvalues)``.

    Each output has shape ``(replicates, m)``; row ``i`` is an independent
    dataset.  Null p-values are exactly uniform, alternatives follow the
    model's p-value law.
    """
    labels = np.empty((config.replicates, config.m), dtype=bool)
    stats = np.empty((config.replicates, config.m))
    pvalues = np.empty((config.replicates, config.m))
    for start, size in _chunks(config.replicates):
        sl = slice(start, start + size)
        labels[sl], stats[sl], pvalues[sl] = _sample_chunk(config, start, size)
    return labels, stats, pvalues


def _step_up_thresholds(pvalues: np.ndarray, alpha: float) -> np.ndarray:
    r, m = pvalues.shape
    ps = np.sort(pvalues, axis=1)
    ok = ps <= alpha * np.arange(1, m + 1) / m
    last = m - 1 - np.argmax(ok[:, ::-1], axis=1)
    k_hat = np.where(ok.any(axis=1), last + 1, 0)
    return alpha * np.maximum(k_hat, 1) / m


def fdr_rule(alpha: float):
    """Threshold rule: the step-up value with its ``alpha/m`` floor."""
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")

    def rule(pvalues: np.ndarray) -> np.ndarray:
        return _step_up_thresholds(pvalues, alpha)

    return rule


def _resolve_rule(rule):
    if callable(rule):
        return rule
    t = float(rule)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"a fixed threshold must lie in [0, 1], got {rule!r}")
    return lambda pvalues: np.full(pvalues.shape[0], t)


def _estimate(draws: np.ndarray) -> McEstimate:
    n = draws.size
    se = float(draws.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return McEstimate(float(draws.mean()), se, n)


def mc_risk(config: SimConfig, rule) -> McEstimate:
    """Estimate the risk of a threshold rule by simulation.

    ``rule`` is either a fixed threshold in ``[0, 1]`` or a callable
    mapping a ``(replicates, m)`` p-value block to one threshold per row
    (e.g. :func:`fdr_rule`).  Returns the mean and its standard error over
    ``config.replicates`` independent datasets.
    """
    rule = _resolve_rule(rule)
    model = config.model
    draws = np.empty(config.replicates)
    for start, size in _chunks(config.replicates):
        labels, _, pvalues = _sample_chunk(config, start, size)
        t_hat = np.asarray(rule(pvalues), dtype=float)
        if config.risk_kind is RiskKind.INDUCTIVE:
            draws[start:start + size] = risk_det(model, t_hat)
        else:
            wrong = np.where(
                labels, pvalues > t_hat[:, None], pvalues <= t_hat[:, None]
            )
            draws[start:start + size] = wrong.mean(axis=1)
    return _estimate(draws)


def concentration_profile(config: SimConfig, alpha: float) -> ConcentrationProfile:
    """Empirical 5/50/95% quantiles of the FDR threshold, with references.

    The references are the BFDR threshold at level ``alpha * pi0`` (the
    deterministic value the FDR threshold tracks once rejections are
    plentiful) and the ``alpha/m`` floor it falls back to under extreme
    sparsity.
    """
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    t_hat = np.empty(config.replicates)
    for start, size in _chunks(config.replicates):
        _, _, pvalues = _sample_chunk(config, start, size)
        t_hat[start:start + size] = _step_up_thresholds(pvalues, alpha)
    q05, med, q95 = np.quantile(t_hat, [0.05, 0.5, 0.95])
    level = alpha * config.model.pi0
    return ConcentrationProfile(
        float(q05),
        float(med),
        float(q95),
        bfdr_threshold(config.model, level).value,
        alpha / config.m,
    )


def empirical_fdp(config: SimConfig, alpha: float, *, null_only: bool = False) -> McEstimate:
    """Mean false discovery proportion of the step-up rule.

    With ``null_only`` every observation is a true null (labels forced to
    0), the regime in which the step-up rule's FDR guarantee is tight.
    """
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    draws = np.empty(config.replicates)
    for start, size in _chunks(config.replicates):
        if null_only:
            rng = _chunk_rng(config.seed, start)
            pvalues = rng.random((size, config.m))
            labels = np.zeros((size, config.m), dtype=bool)
        else:
            labels, _, pvalues = _sample_chunk(config, start, size)
        t_hat = _step_up_thresholds(pvalues, alpha)
        rejected = pvalues <= t_hat[:, None]
        false = (rejected & ~labels).sum(axis=1)
        draws[start:start + size] = false / np.maximum(rejected.sum(axis=1), 1)
    return _estimate(draws)
