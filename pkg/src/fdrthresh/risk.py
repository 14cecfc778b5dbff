"""Misclassification risks, exact FDR risk, and finite-sample bounds.

The deterministic risk of a cutoff ``t`` is ``R(t) = pi0 t + pi1 (1 -
F(t))`` (type I mass plus missed alternatives), minimized at the Bayes
threshold.  The weighted variant scales the type II side by a factor
``lambda in [1, tau)`` and is minimized at ``f^{-1}(tau/lambda)``.

The FDR threshold is data dependent; its exact (inductive) risk is the
finite sum over the step-up count ``k``,

    R = sum_k  C(m,k) R(alpha (k v 1)/m) G(alpha k/m)^k
               Psi_{m-k}(1 - G(alpha), ..., 1 - G(alpha (k+1)/m)),

where ``Psi_j(s_1..s_j) = P(U_(1) <= s_1, ..., U_(j) <= s_j)`` for j
i.i.d. uniforms, evaluated by Steck's complementary recursion

    Psi_j = 1 - sum_{k<j} C(j,k) Psi_k (1 - s_{k+1})^{j-k}.

Every ``Psi_{m-k}`` reads a prefix of one shared bound sequence, so a
single recursion pass serves the whole sum.  The recursion is
subtraction-heavy and its terms span a dynamic range of 2^Theta(m)
(binomials times powers against probabilities as small as ``s_1^m``), so
floating point loses all relative precision by m in the hundreds.  The
pass therefore runs in fixed-point big-integer arithmetic: row sums are
accumulated exactly (one truncation per row, not per term) and the power
table carries its own exponents so its error stays relative through
underflow.  Truncation noise still scales like ``2^-B``, so results are
validated: the prefix-probability API cross-checks every output against
an independent pass 192 bits wider (entrywise agreement, retried wider
otherwise), while the risk assembly checks the cheaper and more telling
identity that its weights total exactly one, escalating to cross-checked
pairs only when the identity fails.  Outputs convert to floats (or logs,
for the risk assembly, whose tiny Psi values underflow float64) at the
end.

The bound evaluators mirror the finite-sample oracle inequalities for
BFDR and FDR thresholding: a sharp-at-the-optimum excess bound and a
ratio floor for BFDR, the concentration-based FDR excess bound, their
explicit rate-constant versions (gated by an applicability condition on
``r``; inapplicability is reported as ``None``, not an error), and the
``rho`` convergence-rate expression with exponent ``gamma = 1 - 1/zeta``
(location) or ``1`` (scale).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .exceptions import CapacityError, DomainError, LevelError, SolverError
from .model import Kind, ModelSpec
from .threshold import Provenance, q_opt

__all__ = [
    "BoundParams",
    "RiskReport",
    "bfdr_excess_bound",
    "bfdr_ratio_floor",
    "exact_fdr_risk",
    "excess",
    "explicit_excess_bound",
    "fdr_excess_bound",
    "rates",
    "rejection_count_distribution",
    "rho_rate",
    "risk_det",
    "risk_weighted",
    "steck_prefix",
    "steck_prefix_log",
    "weighted_bayes_threshold",
]

EXACT_RISK_CAP = 10_000

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class RiskReport:
    """A risk value with its Bayes reference and relative excess."""

    risk: float
    bayes_risk: float
    excess_rel: float
    procedure: Provenance
    bound_values: dict | None = None


@dataclass(frozen=True)
class BoundParams:
    """Free parameters of the FDR/explicit bounds.

    ``epsilon`` controls the concentration split, ``nu`` the explicit
    gate, ``case_a`` picks which additive constant the explicit FDR bound
    uses (1 for m >> tau, 2 otherwise), and ``weight`` is the type II
    weighting factor for weighted risks.
    """

    epsilon: float = 0.5
    nu: float = 0.25
    case_a: int = 1
    weight: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not (0.0 < self.nu < 1.0):
            raise DomainError(f"nu must lie in (0, 1), got {self.nu!r}")
        if self.case_a not in (1, 2):
            raise DomainError(f"case_a must be 1 or 2, got {self.case_a!r}")
        if not (self.weight >= 1.0 and math.isfinite(self.weight)):
            raise DomainError(f"weight must be a finite real >= 1, got {self.weight!r}")


# ---------------------------------------------------------------- plain risks


def risk_det(model: ModelSpec, t):
    """Misclassification risk ``pi0 t + pi1 (1 - F(t))`` of a fixed cutoff."""
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    return model.pi0 * t + model.pi1 * (1.0 - model.alt_cdf(t))


def _checked_weight(model: ModelSpec, weight: float) -> float:
    weight = float(weight)
    if not (1.0 <= weight < model.tau):
        raise DomainError(
            f"weight must lie in [1, tau) = [1, {model.tau!r}), got {weight!r}"
        )
    return weight


def risk_weighted(model: ModelSpec, t, weight: float):
    """Type-II-weighted risk ``pi0 t + weight * pi1 * (1 - F(t))``."""
    weight = _checked_weight(model, weight)
    if np.ndim(t):
        t = np.asarray(t, dtype=float)
        return model.pi0 * t + weight * model.pi1 * (1.0 - model.alt_cdf(t))
    return model.pi0 * float(t) + weight * model.pi1 * (1.0 - model.alt_cdf(t))


def weighted_bayes_threshold(model: ModelSpec, weight: float) -> float:
    """Minimizer ``f^{-1}(tau/weight)`` of the weighted risk."""
    weight = _checked_weight(model, weight)
    return model.inverse_alt_pdf(model.tau / weight)


def excess(model: ModelSpec, risk: float, procedure: Provenance,
           bound_values: dict | None = None) -> RiskReport:
    """Package a risk value with the Bayes reference and relative excess."""
    bayes = risk_det(model, model.bayes_threshold)
    if not bayes > 0.0:
        raise DomainError("Bayes risk must be positive")
    return RiskReport(float(risk), bayes, (float(risk) - bayes) / bayes,
                      procedure, bound_values)


# ------------------------------------------------------------ Steck recursion


def _checked_bounds(bounds) -> np.ndarray:
    s = np.asarray(bounds, dtype=float)
    if s.ndim != 1:
        raise DomainError("bounds must be one-dimensional")
    if s.size:
        if not np.all(np.isfinite(s)) or s[0] < 0.0 or s[-1] > 1.0:
            raise DomainError("bounds must lie in [0, 1]")
        if np.any(np.diff(s) < 0.0):
            raise DomainError("bounds must be nondecreasing")
    return s


_VERIFY_BITS = 192  # width gap between the working and the checking pass


def _steck_scaled(s: np.ndarray, B: int) -> list[int]:
    # One fixed-point pass at width B.  Psi values are integer numerators
    # over 2^B.  The power table (1 - s_{k+1})^(j-k) is kept in floating
    # form (mantissa, exponent) so its truncation stays relative through
    # underflow, and each row's sum accumulates exact term products at
    # width B + 64, so a row loses one ulp total rather than one per term.
    n = len(s)
    one = 1 << B
    base: list[int] = []
    for v in s:
        num, den = (1.0 - float(v)).as_integer_ratio()  # dyadic, exact
        base.append((num << B) // den)
    psis = [one]
    mant: list[int] = []  # value of pw[k] is mant[k] * 2^exp[k]
    exp: list[int] = []
    binom = [1]
    acc_one = one << 64
    for j in range(1, n + 1):
        binom.append(1)
        for k in range(j - 1, 0, -1):
            binom[k] += binom[k - 1]
        for k in range(j - 1):
            mk = mant[k]
            if not mk:
                continue
            prod = mk * base[k]
            sh = prod.bit_length() - B
            if sh > 0:
                mant[k] = prod >> sh
                exp[k] += sh - B
            else:
                mant[k] = prod
                exp[k] -= B
        mant.append(base[j - 1])
        exp.append(-B)
        total = 0
        for k in range(j):
            pk = psis[k]
            mk = mant[k]
            if not pk or not mk:
                continue
            # a term below 2^(-B-72) cannot move the row once every peer
            # is counted, so test magnitudes before multiplying
            if binom[k].bit_length() + pk.bit_length() + mk.bit_length() + exp[k] < -72:
                continue
            t = binom[k] * (pk * mk)  # exact; value t * 2^(exp[k] - B)
            sh = exp[k] + 64
            total += t << sh if sh >= 0 else t >> -sh
        # total >= 0 termwise, so pj <= one; noise can push it negative
        pj = (acc_one - total) >> 64
        psis.append(pj if pj > 0 else 0)
    return psis


def _base_width(s: np.ndarray) -> int:
    n = len(s)
    c = max(0.5, -math.log2(float(s[0])))
    return int(math.ceil(2.0 * c * n)) + 100 + 4 * max(1, n).bit_length()


def _agrees(a: list[int], b: list[int]) -> bool:
    # a at width B, b at width B + _VERIFY_BITS; accept when every entry
    # matches to ~2^-44 relative, one ulp of the narrow pass allowed.  A
    # zero entry is always corruption (Psi_j >= s_1^j sits far above the
    # fixed-point floor), so zeros force a retry.
    ulp = 1 << _VERIFY_BITS
    for x, y in zip(a, b):
        if not y or abs((x << _VERIFY_BITS) - y) > (y >> 44) + ulp:
            return False
    return True


def _steck_resolved(s: np.ndarray, accept=None, start: int | None = None) -> tuple[list[int], int]:
    # Truncation noise scales like 2^-B while the true values stay put, so
    # agreement between two passes 192 bits apart certifies the pair and a
    # disagreement is retried wider.  ``accept`` may impose an extra
    # consumer-level check on the (psis, width) candidate.
    n = len(s)
    if n == 0 or float(s[0]) <= 0.0:
        B = 64
        return [1 << B] + [0] * n, B
    B = _base_width(s) if start is None else start
    while True:
        narrow = _steck_scaled(s, B)
        wide = _steck_scaled(s, B + _VERIFY_BITS)
        if _agrees(narrow, wide) and (accept is None or accept(wide, B + _VERIFY_BITS)):
            return wide, B + _VERIFY_BITS
        if B > 64 * n + 65536:
            raise SolverError(
                f"order-statistic probabilities failed to stabilize at "
                f"width {B} bits (n = {n})"
            )
        B += 384 + n // 4


def _scaled_to_float(x: int, B: int) -> float:
    if x <= 0:
        return 0.0
    shift = max(0, x.bit_length() - 53)
    return min(1.0, math.ldexp(float(x >> shift), shift - B))


def _scaled_to_log(x: int, B: int) -> float:
    if x <= 0:
        return -math.inf
    shift = max(0, x.bit_length() - 53)
    return math.log(x >> shift) + (shift - B) * _LOG2


def steck_prefix(bounds) -> np.ndarray:
    """All prefix order-statistic probabilities of a bound sequence.

    Parameters
    ----------
    bounds : array_like
        Nondecreasing values ``s_1 <= ... <= s_n`` in ``[0, 1]``.

    Returns
    -------
    numpy.ndarray
        ``[Psi_0, ..., Psi_n]`` with ``Psi_j = P(U_(1) <= s_1, ...,
        U_(j) <= s_j)`` for ``j`` i.i.d. uniforms, each in ``[0, 1]``.
    """
    s = _checked_bounds(bounds)
    psis, B = _steck_resolved(s)
    return np.array([_scaled_to_float(p, B) for p in psis])


def steck_prefix_log(bounds) -> np.ndarray:
    """``log`` of :func:`steck_prefix`, usable far past float underflow."""
    s = _checked_bounds(bounds)
    psis, B = _steck_resolved(s)
    return np.array([_scaled_to_log(p, B) for p in psis])


# -------------------------------------------------------------- exact FDR risk


def _fdr_log_weights(model: ModelSpec, m: int, alpha: float) -> np.ndarray:
    # log of P(step-up count = k), k = 0..m: the first-violation partition
    # of the step-up event in terms of mixture order statistics
    if int(m) != m or m < 1:
        raise DomainError(f"m must be an integer >= 1, got {m!r}")
    if m > EXACT_RISK_CAP:
        raise CapacityError(
            f"exact FDR risk is capped at m = {EXACT_RISK_CAP} (requested {m})"
        )
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    m = int(m)
    k = np.arange(m + 1)
    g = model.mixture_cdf(alpha * k / m)
    s = 1.0 - g[1:][::-1]
    # the sequence is monotone in exact arithmetic; insure against rounding dips
    s = np.minimum(np.maximum.accumulate(np.maximum(s, 0.0)), 1.0)
    log_binom = gammaln(m + 1.0) - gammaln(k + 1.0) - gammaln(m - k + 1.0)
    with np.errstate(divide="ignore"):
        log_g_pow = np.where(k == 0, 0.0, k * np.log(np.maximum(g, 1e-320)))

    def assemble(psis: list[int], B: int) -> np.ndarray:
        log_psi = np.array([_scaled_to_log(p, B) for p in psis])
        return log_binom + log_g_pow + log_psi[::-1]

    def partition_holds(psis: list[int], B: int) -> bool:
        # binomial-times-power multipliers amplify Psi noise that the
        # entrywise agreement check cannot see, so the weights must also
        # reproduce their exact unit total
        return bool(abs(float(np.exp(logsumexp(assemble(psis, B)))) - 1.0) <= 1e-9)

    n = len(s)
    start = None
    if n and float(s[0]) > 0.0:
        # one cheap pass first: the unit total is the corruption detector,
        # and a failure escalates to the cross-checked wider pairs
        B0 = _base_width(s)
        out = assemble(_steck_scaled(s, B0), B0)
        if abs(float(np.exp(logsumexp(out))) - 1.0) <= 1e-9:
            return out
        start = B0 + 384 + n // 4
    psis, B = _steck_resolved(s, accept=partition_holds, start=start)
    return assemble(psis, B)


def rejection_count_distribution(model: ModelSpec, m: int, alpha: float) -> np.ndarray:
    """P.m.f. of the FDR step-up count ``k_hat`` over ``0..m``."""
    return np.exp(_fdr_log_weights(model, m, alpha))


def exact_fdr_risk(model: ModelSpec, m: int, alpha: float) -> RiskReport:
    """Exact inductive risk of the FDR threshold at level ``alpha``.

    Sums ``R(alpha (k v 1)/m)`` over the distribution of the step-up
    count.  Cost is quadratic in ``m`` (with big-integer arithmetic inside
    the Steck pass); requests beyond ``EXACT_RISK_CAP`` raise
    :class:`CapacityError`.
    """
    log_w = _fdr_log_weights(model, m, alpha)
    m = int(m)
    k_or_1 = np.maximum(np.arange(m + 1), 1)
    risks = risk_det(model, float(alpha) * k_or_1 / m)
    value = float(np.exp(logsumexp(log_w + np.log(risks))))
    return excess(model, value, Provenance.FDR)


# -------------------------------------------------------------------- bounds


def _admissible_q(model: ModelSpec, alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < model.pi0):
        raise LevelError(
            f"alpha must lie in (0, pi0) = (0, {model.pi0!r}), got {alpha!r}"
        )
    return 1.0 / alpha - 1.0


def bfdr_excess_bound(model: ModelSpec, alpha: float) -> float:
    """Upper bound on the BFDR-threshold excess risk, sharp at the
    optimal level; requires ``alpha <= 1/2``."""
    q = _admissible_q(model, alpha)
    if alpha > 0.5:
        raise LevelError(f"the excess bound needs alpha <= 1/2, got {alpha!r}")
    C = model.power
    gamma = max(0.0, C - model.alt_cdf(model.inverse_psi(q * model.tau)))
    return model.pi1 * max(C / q - C / q_opt(model), gamma)


def bfdr_ratio_floor(model: ModelSpec, alpha: float) -> float:
    """Lower bound on ``R(t*)/R(t^B)`` for the BFDR threshold."""
    q = _admissible_q(model, alpha)
    hit = max(0.0, 1.0 - 1.0 / q) * model.alt_cdf(1.0 / (q * model.tau))
    return model.pi1 * (1.0 - hit) / risk_det(model, model.bayes_threshold)


def fdr_excess_bound(model: ModelSpec, m: int, alpha: float,
                     params: BoundParams = BoundParams()) -> float:
    """Upper bound on the FDR-threshold excess risk at level ``alpha``."""
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise LevelError(f"alpha must lie in (0, 1), got {alpha!r}")
    if int(m) != m or m < 1:
        raise DomainError(f"m must be an integer >= 1, got {m!r}")
    eps = params.epsilon
    C = model.power
    q_eps = 1.0 / (alpha * model.pi0 * (1.0 - eps)) - 1.0
    gamma_eps = max(0.0, C - model.alt_cdf(model.inverse_psi(q_eps * model.tau)))
    gamma_prime = max(0.0, C - model.alt_cdf(alpha / m))
    tail = math.exp(-m * eps * eps * (C - gamma_eps) / (4.0 * (model.tau + 1.0)))
    return (
        model.pi1 * alpha / (1.0 - alpha)
        + alpha / (m * (1.0 - alpha) ** 2)
        + model.pi1 * min(gamma_prime, gamma_eps + tail)
    )


def rates(model: ModelSpec) -> tuple[float, float]:
    """Rate constants ``(r, K)`` entering the explicit bounds.

    Location: ``r = (zeta log tau + |D^{-1}(C)|^zeta)^(1-1/zeta)`` and
    ``K = d(0)``; scale: ``r = zeta log tau + D^{-1}(C/2)^zeta`` and
    ``K = 2 D^{-1}(C/2) d(D^{-1}(C/2))``.
    """
    z = model.shape.zeta
    log_tau = math.log(model.tau)
    if model.kind is Kind.LOCATION:
        w = model.shape.quantile(model.power)
        r = (z * log_tau + abs(w) ** z) ** (1.0 - 1.0 / z)
        K = model.shape.density(0.0)
    else:
        w = model.shape.quantile(model.power / 2.0)
        r = z * log_tau + w**z
        K = 2.0 * w * model.shape.density(w)
    return r, K


def explicit_excess_bound(model: ModelSpec, m: int, alpha: float, which: str,
                          params: BoundParams = BoundParams()) -> float | None:
    """Explicit rate-constant excess bound for ``which`` in {'bfdr', 'fdr'}.

    Returns ``None`` when the applicability gate fails (level not below
    1/2, or ``m`` too small for the inequality's premise on ``r``).
    """
    if which not in ("bfdr", "fdr"):
        raise DomainError(f"which must be 'bfdr' or 'fdr', got {which!r}")
    if int(m) != m or m < 2:
        raise DomainError(f"m must be an integer >= 2, got {m!r}")
    alpha = float(alpha)
    if not (0.0 < alpha < model.pi0):
        raise LevelError(
            f"alpha must lie in (0, pi0) = (0, {model.pi0!r}), got {alpha!r}"
        )
    if alpha >= 0.5:
        return None
    r, K = rates(model)
    C = model.power
    nu = params.nu
    qo = q_opt(model)
    scale = K / (C * (1.0 - nu))
    if which == "bfdr":
        q = 1.0 / alpha - 1.0
        gap = math.log(q / qo) - math.log(nu)
        if r < scale * gap:
            return None
        return model.pi1 * max(C / q - C / qo, K * gap / r)
    if params.case_a == 1:
        d_a = -math.log(nu * model.pi0 * (1.0 - params.epsilon))
        tail = model.pi1 * math.exp(
            -m * nu * params.epsilon**2 * C / (4.0 * (model.tau + 1.0))
        )
    else:
        d_a = math.log(C * m / (nu * model.tau))
        tail = 0.0
    gap = math.log(1.0 / (alpha * qo)) + d_a
    if r < scale * gap:
        return None
    return (
        model.pi1 * (alpha / (1.0 - alpha) + K * max(0.0, gap) / r)
        + alpha / (m * (1.0 - alpha) ** 2)
        + tail
    )


def rho_rate(m: int, alpha: float, gamma_exponent: float) -> float:
    """Convergence-rate value ``alpha + (log(alpha^{-1}/(log m)^g))_+ / (log m)^g``."""
    if int(m) != m or m < 3:
        raise DomainError(f"m must be an integer >= 3, got {m!r}")
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    g = float(gamma_exponent)
    if not (0.0 < g <= 1.0):
        raise DomainError(f"gamma_exponent must lie in (0, 1], got {gamma_exponent!r}")
    lg = math.log(m) ** g
    return alpha + max(0.0, math.log(1.0 / (alpha * lg))) / lg
