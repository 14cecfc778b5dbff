"""Threshold rules: Bayes, BFDR, and empirical BH/FDR procedures.

Deterministic rules live on a ModelSpec: the Bayes threshold is the cached
likelihood-ratio cutoff ``f^{-1}(tau)``, and the BFDR threshold at level
``alpha`` is ``Psi^{-1}(q tau)`` with the recovery parameter
``q = 1/alpha - 1``, the unique ``t`` where the Bayesian FDR

    BFDR(t) = pi0 t / G(t) = 1 / (1 + Psi(t)/tau)

equals ``alpha``.  Levels are admissible on ``(0, pi0)``; the optimal
recovery parameter ``q_opt = C / (tau t^B)`` makes both rules coincide.

Empirical rules act on p-values: the BH threshold is the step-up value
``alpha k_hat / m`` with ``k_hat = max{k : p_(k) <= alpha k / m}`` (zero
when the crossing set is empty), and the FDR threshold floors it at the
Bonferroni point ``alpha/m``.  Test statistics are standardized first
(``p = D(x)`` for location alternatives, ``p = 2 D(|x|)`` for scale) and
thresholds convert back to the statistic scale through the same tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

from .exceptions import DomainError, LevelError, SolverError
from .model import CanonicalParams, Kind, ModelSpec, _as_kind, _as_shape, calibrate
from .subbotin import SubbotinShape

__all__ = [
    "Family",
    "LevelChoice",
    "Provenance",
    "ThresholdResult",
    "alpha_opt",
    "bayes_threshold",
    "bfdr_of",
    "bfdr_threshold",
    "bh_threshold",
    "fdr_threshold",
    "fdr_threshold_stats",
    "pvalues_from_stats",
    "q_opt",
    "statistic_scale",
]


class Provenance(Enum):
    """Which rule produced a threshold."""

    BAYES = "bayes"
    BFDR = "bfdr"
    BH = "bh"
    FDR = "fdr"
    BONFERRONI = "bonferroni"


class Family(Enum):
    """Named families with closed-form optimal-level solvers."""

    GAUSSIAN_LOCATION = "gaussian-location"
    GAUSSIAN_SCALE = "gaussian-scale"
    LAPLACE_SCALE = "laplace-scale"


@dataclass(frozen=True)
class ThresholdResult:
    """A p-value-scale threshold with its provenance and step-up count."""

    value: float
    provenance: Provenance
    k_hat: int | None = None


@dataclass(frozen=True)
class LevelChoice:
    """A nominal level: either fixed, or the optimal level at (beta0, C0)."""

    alpha: float | None = None
    beta0: float | None = None
    C0: float | None = None

    def __post_init__(self):
        fixed = self.alpha is not None
        opt = self.beta0 is not None or self.C0 is not None
        if fixed == opt or (opt and (self.beta0 is None or self.C0 is None)):
            raise DomainError("give either alpha, or both beta0 and C0")
        if fixed and not (0.0 < self.alpha < 1.0):
            raise LevelError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    @classmethod
    def fixed(cls, alpha: float) -> "LevelChoice":
        return cls(alpha=float(alpha))

    @classmethod
    def opt_at(cls, beta0: float, C0: float) -> "LevelChoice":
        return cls(beta0=float(beta0), C0=float(C0))

    def resolve(self, kind, shape, m: int) -> float:
        """The level to run at: ``alpha`` itself, or ``(1 + q_opt)^{-1}``
        for the model calibrated at ``(beta0, C0)`` with this ``m``."""
        if self.alpha is not None:
            return self.alpha
        params = CanonicalParams(power=self.C0, beta=self.beta0)
        return 1.0 / (1.0 + q_opt(calibrate(kind, shape, params, m)))

    def label(self) -> str:
        if self.alpha is not None:
            return f"fixed({self.alpha:g})"
        return f"opt({self.beta0:g},{self.C0:g})"


# ----------------------------------------------------------- model-based rules


def bayes_threshold(model: ModelSpec) -> ThresholdResult:
    """The risk-minimizing deterministic cutoff ``f^{-1}(tau)``."""
    return ThresholdResult(model.bayes_threshold, Provenance.BAYES)


def bfdr_of(model: ModelSpec, t: float) -> float:
    """Bayesian FDR ``pi0 t / G(t)`` of the cutoff ``t``, increasing in t."""
    return 1.0 / (1.0 + model.psi_ratio(t) / model.tau)


def bfdr_threshold(model: ModelSpec, alpha: float) -> ThresholdResult:
    """The unique ``t`` with ``BFDR(t) = alpha``.

    Raises
    ------
    LevelError
        If ``alpha`` is outside the admissible interval ``(0, pi0)``.
    """
    alpha = float(alpha)
    if not (0.0 < alpha < model.pi0):
        raise LevelError(
            f"alpha must lie in (0, pi0) = (0, {model.pi0!r}), got {alpha!r}"
        )
    q = 1.0 / alpha - 1.0
    return ThresholdResult(model.inverse_psi(q * model.tau), Provenance.BFDR)


def q_opt(model: ModelSpec) -> float:
    """Optimal recovery parameter ``C/(tau t^B) >= 1``: the ``q`` whose
    level ``(1+q)^{-1}`` makes the BFDR threshold equal the Bayes one."""
    return model.power / (model.tau * model.bayes_threshold)


def _expanding_root(g, lo: float, hi: float, what: str) -> float:
    # g(lo) < 0; double hi until the sign flips, then polish
    for _ in range(200):
        if g(hi) > 0.0:
            return optimize.brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16)
        lo, hi = hi, hi * 2.0
        if not math.isfinite(hi):
            break
    raise SolverError(f"{what}: root not bracketed")


def alpha_opt(family, m: int, beta0: float, C0: float) -> float:
    """Optimal level ``(1 + q_opt)^{-1}`` for a named family at ``tau = m**beta0``.

    Closed forms/monotone roots per family: Gaussian location evaluates the
    Bayes threshold directly; Gaussian scale solves ``2 beta0 log m +
    2 log x = D^{-1}(C0/2)^2 (x^2 - 1)`` for ``x > 1``; Laplace scale solves
    ``beta0 log m + log y = (y-1) log(1/C0)`` and returns ``1/(1+y)``.
    """
    if isinstance(family, str):
        family = Family(family)
    if int(m) != m or m < 2:
        raise DomainError(f"m must be an integer >= 2, got {m!r}")
    if not (0.0 < beta0 <= 1.0):
        raise DomainError(f"beta0 must lie in (0, 1], got {beta0!r}")
    if not (0.0 < C0 < 1.0):
        raise DomainError(f"C0 must lie in (0, 1), got {C0!r}")
    log_tau = beta0 * math.log(m)
    if family is Family.LAPLACE_SCALE:
        L = math.log(1.0 / C0)
        y = _expanding_root(lambda y: (y - 1.0) * L - math.log(y) - log_tau,
                            1.0 + 1e-12, 2.0, "alpha_opt laplace-scale")
        return 1.0 / (1.0 + y)
    gauss = SubbotinShape(2.0)
    if family is Family.GAUSSIAN_LOCATION:
        w = gauss.quantile(C0)
        t_bayes = gauss.upper_tail(math.sqrt(w * w + 2.0 * log_tau))
    else:
        w = gauss.quantile(C0 / 2.0)
        x = _expanding_root(
            lambda x: w * w * (x * x - 1.0) - 2.0 * math.log(x) - 2.0 * log_tau,
            1.0 + 1e-12, 2.0, "alpha_opt gaussian-scale")
        t_bayes = 2.0 * gauss.upper_tail(w * x)
    q = C0 / (math.exp(log_tau) * t_bayes)
    return 1.0 / (1.0 + q)


# ---------------------------------------------------------------- empirical BH


def _checked_pvalues(pvalues) -> np.ndarray:
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise DomainError("pvalues must be a nonempty one-dimensional collection")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise DomainError("every p-value must lie in [0, 1]")
    return p


def _checked_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def bh_threshold(pvalues, alpha: float) -> ThresholdResult:
    """Step-up threshold ``alpha k_hat / m``; zero if nothing crosses."""
    p = _checked_pvalues(pvalues)
    alpha = _checked_alpha(alpha)
    m = p.size
    crossed = np.nonzero(np.sort(p, kind="stable") <= alpha * np.arange(1, m + 1) / m)[0]
    k_hat = int(crossed[-1]) + 1 if crossed.size else 0
    value = alpha * k_hat / m if k_hat else 0.0
    return ThresholdResult(value, Provenance.BH, k_hat)


def fdr_threshold(pvalues, alpha: float) -> ThresholdResult:
    """BH threshold floored at the Bonferroni point ``alpha/m``."""
    p = _checked_pvalues(pvalues)
    bh = bh_threshold(p, alpha)
    return ThresholdResult(max(bh.value, float(alpha) / p.size), Provenance.FDR, bh.k_hat)


def pvalues_from_stats(kind, shape, stats) -> np.ndarray:
    """Standardize statistics: ``D(x)`` (location) or ``2 D(|x|)`` (scale)."""
    kind = _as_kind(kind)
    shape = _as_shape(shape)
    x = np.asarray(stats, dtype=float)
    if x.size and not np.all(np.isfinite(x)):
        raise DomainError("statistics must be finite")
    if kind is Kind.LOCATION:
        return np.asarray(shape.upper_tail(x))
    return np.asarray(2.0 * shape.upper_tail(np.abs(x)))


def statistic_scale(kind, shape, t: float) -> float:
    """Map a p-value-scale threshold back to the statistic scale."""
    kind = _as_kind(kind)
    shape = _as_shape(shape)
    t = float(t)
    if not (0.0 < t < 1.0):
        raise DomainError(f"t must lie in (0, 1), got {t!r}")
    if kind is Kind.LOCATION:
        return shape.quantile(t)
    return shape.quantile(t / 2.0)


def fdr_threshold_stats(stats, kind, shape, alpha: float) -> ThresholdResult:
    """FDR threshold computed from raw statistics via standardization.

    The step-up count is identical to running ``fdr_threshold`` on the
    standardized p-values; the returned value is on the p-value scale
    (convert with :func:`statistic_scale`).
    """
    return fdr_threshold(pvalues_from_stats(kind, shape, stats), alpha)
