"""Location and scale p-value mixture models.

Under the two-group mixture a p-value is Uniform(0,1) with probability
``pi0`` and drawn from the alternative c.d.f. ``F`` with probability
``pi1 = 1 - pi0 = 1/(1 + tau)``, where

    location: F(t) = D(D^{-1}(t) - mu),         mu > 0, zeta > 1,
    scale:    F(t) = 2 D(D^{-1}(t/2) / sigma),  sigma > 1, zeta >= 1,

with ``D`` the Subbotin upper tail for the chosen shape.  Both families
make ``F`` strictly concave with density ``f = F'`` decreasing from
``+inf`` at ``0+``, so the likelihood-ratio cutoff ``f^{-1}(tau)`` (the
Bayes threshold) exists for every sparsity ``tau > 1``.  The secant ratio
``Psi(t) = F(t)/t`` decreases from ``f(0+)`` to 1; its inverse drives the
BFDR threshold downstream.

Calibration maps the canonical pair (power ``C``, sparsity ``tau``) to the
natural effect size.  The location case is closed form,

    mu = (zeta log tau + |D^{-1}(C)|^zeta)^(1/zeta) - D^{-1}(C),

while the scale case solves ``w^zeta (sigma^zeta - 1)/zeta = log sigma +
log tau`` with ``w = D^{-1}(C/2)``; that function dips below its value at
``sigma = 1`` before growing, so the root beyond the dip is unique and is
found by doubling the bracket upper end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize

from .exceptions import CalibrationError, DomainError, RangeError, SolverError
from .subbotin import SubbotinShape

__all__ = [
    "CanonicalParams",
    "Kind",
    "ModelSpec",
    "calibrate",
    "location_model",
    "scale_model",
]

_MAX_DOUBLINGS = 200


class Kind(Enum):
    """Which natural parameter carries the signal."""

    LOCATION = "location"
    SCALE = "scale"


def _as_kind(kind) -> Kind:
    if isinstance(kind, Kind):
        return kind
    try:
        return Kind(str(kind).lower())
    except ValueError:
        raise DomainError(f"unknown model kind {kind!r}") from None


def _as_shape(shape) -> SubbotinShape:
    if isinstance(shape, SubbotinShape):
        return shape
    return SubbotinShape(float(shape))


def _unit_array(t, name: str, *, closed: bool) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if closed:
        bad = (arr < 0.0) | (arr > 1.0)
    else:
        bad = (arr <= 0.0) | (arr >= 1.0)
    if np.any(bad):
        interval = "[0, 1]" if closed else "(0, 1)"
        raise DomainError(f"{name} must lie in {interval}")
    return arr, arr.ndim == 0


def _restore(arr, scalar: bool):
    return float(arr) if scalar else arr


@dataclass(frozen=True)
class CanonicalParams:
    """Canonical (power, sparsity) parametrization of a model.

    Exactly one of ``beta`` (sparsity exponent, ``tau = m**beta``) or an
    explicit ``tau > 1`` must be given; ``power`` is the target value of
    ``F`` at the Bayes threshold.
    """

    power: float
    beta: float | None = None
    tau: float | None = None

    def __post_init__(self):
        if not (0.0 < self.power < 1.0):
            raise DomainError(f"power must lie in (0, 1), got {self.power!r}")
        if (self.beta is None) == (self.tau is None):
            raise DomainError("exactly one of beta or tau must be given")
        if self.beta is not None and not (0.0 < self.beta <= 1.0):
            raise DomainError(f"beta must lie in (0, 1], got {self.beta!r}")
        if self.tau is not None and not (self.tau > 1.0 and math.isfinite(self.tau)):
            raise DomainError(f"tau must be a finite real > 1, got {self.tau!r}")

    def resolve_tau(self, m: int | None = None) -> float:
        """Return the explicit sparsity, using ``tau = m**beta`` if needed."""
        if self.tau is not None:
            return float(self.tau)
        if m is None:
            raise DomainError("m is required to resolve tau = m**beta")
        if int(m) != m or m < 2:
            raise DomainError(f"m must be an integer >= 2, got {m!r}")
        return float(m) ** self.beta


@dataclass(frozen=True)
class ModelSpec:
    """An immutable location or scale mixture model.

    Parameters
    ----------
    kind : Kind
        LOCATION (shift ``mu``, requires ``zeta > 1``) or SCALE
        (stretch ``sigma > 1``).
    shape : SubbotinShape
        Null Subbotin shape.
    tau : float
        Sparsity ``pi0/pi1 > 1``.
    effect : float
        ``mu`` for location, ``sigma`` for scale.

    The mixture weights, the Bayes threshold ``f^{-1}(tau)`` and its power
    ``F(bayes_threshold)`` are computed once at construction so every
    downstream formula reads consistent values.
    """

    kind: Kind
    shape: SubbotinShape
    tau: float
    effect: float
    pi0: float = field(init=False, repr=False)
    pi1: float = field(init=False, repr=False)
    bayes_threshold: float = field(init=False, repr=False)
    power: float = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", _as_kind(self.kind))
        object.__setattr__(self, "shape", _as_shape(self.shape))
        tau = float(self.tau)
        effect = float(self.effect)
        if not (math.isfinite(tau) and tau > 1.0):
            raise DomainError(f"tau must be a finite real > 1, got {self.tau!r}")
        if not math.isfinite(effect):
            raise DomainError("effect must be finite")
        if self.kind is Kind.LOCATION:
            if self.shape.zeta <= 1.0:
                raise DomainError("location models require zeta > 1")
            if effect <= 0.0:
                raise DomainError(f"location effect mu must be > 0, got {effect!r}")
        else:
            if effect <= 1.0:
                raise DomainError(f"scale effect sigma must be > 1, got {effect!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "effect", effect)
        pi1 = 1.0 / (1.0 + tau)
        object.__setattr__(self, "pi1", pi1)
        object.__setattr__(self, "pi0", 1.0 - pi1)
        object.__setattr__(self, "bayes_threshold", self.inverse_alt_pdf(tau))
        object.__setattr__(self, "power", self.alt_cdf(self.bayes_threshold))
        # a microscopic effect paired with a larger tau pushes f^{-1}(tau)
        # past float range; refuse rather than hand out zero-power models
        if not (self.bayes_threshold > 0.0 and self.power > 0.0):
            raise DomainError(
                "degenerate model: the Bayes threshold underflows for "
                f"effect {effect!r} at tau {tau!r}"
            )

    # ------------------------------------------------------------- alternative

    def alt_cdf(self, t):
        """Alternative p-value c.d.f. ``F(t)`` on ``[0, 1]``."""
        arr, scalar = _unit_array(t, "t", closed=True)
        # floor keeps t/2 inside the normal range for the scale branch
        inner = np.clip(arr, 1e-307, np.nextafter(1.0, 0.0))
        if self.kind is Kind.LOCATION:
            x = self.shape.quantile(inner)
            f = self.shape.upper_tail(x - self.effect)
        else:
            x = self.shape.quantile(inner / 2.0)
            f = 2.0 * self.shape.upper_tail(x / self.effect)
        out = np.where(arr <= 0.0, 0.0, np.where(arr >= 1.0, 1.0, f))
        return _restore(out, scalar)

    def log_alt_cdf(self, t):
        """``log F(t)`` for ``t`` in ``(0, 1]``, accurate for tiny ``t``."""
        arr, scalar = _unit_array(t, "t", closed=True)
        if np.any(arr <= 0.0):
            raise DomainError("t must be positive for log_alt_cdf")
        inner = np.clip(arr, 1e-307, np.nextafter(1.0, 0.0))
        if self.kind is Kind.LOCATION:
            x = self.shape.quantile(inner)
            f = self.shape.log_upper_tail(x - self.effect)
        else:
            x = self.shape.quantile(inner / 2.0)
            f = math.log(2.0) + self.shape.log_upper_tail(x / self.effect)
        out = np.where(arr >= 1.0, 0.0, f)
        return _restore(out, scalar)

    def _log_pdf_exponent(self, x):
        # log f expressed through x = D^{-1}(t) (location) or D^{-1}(t/2)
        z = self.shape.zeta
        if self.kind is Kind.LOCATION:
            return (np.abs(x) ** z - np.abs(x - self.effect) ** z) / z
        sigma = self.effect
        return np.abs(x) ** z * (1.0 - sigma**-z) / z - math.log(sigma)

    def alt_pdf(self, t):
        """Alternative p-value density ``f(t) = F'(t)``, decreasing on (0, 1)."""
        arr, scalar = _unit_array(t, "t", closed=False)
        if self.kind is Kind.LOCATION:
            x = self.shape.quantile(arr)
        else:
            x = self.shape.quantile(arr / 2.0)
        return _restore(np.exp(self._log_pdf_exponent(x)), scalar)

    def psi_ratio(self, t):
        """Secant ratio ``Psi(t) = F(t)/t`` for ``t`` in ``(0, 1]``."""
        arr, scalar = _unit_array(t, "t", closed=True)
        if np.any(arr <= 0.0):
            raise DomainError("t must be positive for psi_ratio")
        return _restore(self.alt_cdf(arr) / arr, scalar)

    def mixture_cdf(self, t):
        """Mixture c.d.f. ``G(t) = pi0*t + pi1*F(t)``."""
        arr, scalar = _unit_array(t, "t", closed=True)
        return _restore(self.pi0 * arr + self.pi1 * self.alt_cdf(arr), scalar)

    # --------------------------------------------------------------- inverses

    def inverse_alt_pdf(self, y: float) -> float:
        """The ``t`` with ``f(t) = y``; ``y`` must lie in ``(f(1-), f(0+))``.

        Raises
        ------
        RangeError
            If ``y`` is at or outside either end of the range of ``f``.
        """
        y = float(y)
        if not (math.isfinite(y) and y > 0.0):
            raise RangeError(f"y must be a finite real > 0, got {y!r}")
        z = self.shape.zeta
        if self.kind is Kind.SCALE:
            sigma = self.effect
            if y <= 1.0 / sigma:
                raise RangeError(
                    f"y={y!r} is at or below the infimum f(1-) = 1/sigma = {1.0 / sigma!r}"
                )
            x = (z * math.log(sigma * y) / (1.0 - sigma**-z)) ** (1.0 / z)
            return 2.0 * self.shape.upper_tail(x)
        mu = self.effect
        if z == 2.0:
            x = math.log(y) / mu + mu / 2.0
        else:
            logy = math.log(y)

            def g(x):
                return (abs(x) ** z - abs(x - mu) ** z) / z - logy

            x = self._bracketed_root(g, mu / 2.0, increasing=True)
        return self.shape.upper_tail(x)

    def inverse_psi(self, y: float) -> float:
        """The ``t`` with ``Psi(t) = y``; ``y`` must exceed the infimum 1."""
        y = float(y)
        if not (math.isfinite(y) and y > 1.0):
            raise RangeError(f"y={y!r} is at or below the infimum Psi(1) = 1")
        logy = math.log(y)

        def h(s):
            return self.log_alt_cdf(math.exp(s)) - s - logy

        # h is strictly decreasing with h(0) = -log y < 0; expand downward
        lo, hi = -2.0, 0.0
        for _ in range(_MAX_DOUBLINGS):
            if h(lo) > 0.0:
                break
            hi = lo
            lo *= 2.0
            if lo < -700.0:
                raise SolverError("inverse_psi bracket fell below representable t")
        else:
            raise SolverError("inverse_psi failed to bracket a root")
        s = optimize.brentq(h, lo, hi, xtol=1e-14, rtol=8.9e-16)
        return math.exp(s)

    def _bracketed_root(self, g, pivot: float, *, increasing: bool) -> float:
        # expand away from the pivot (where g is known to cross) then brentq
        g0 = g(pivot)
        if g0 == 0.0:
            return pivot
        step = max(1.0, abs(pivot))
        go_up = (g0 < 0.0) == increasing
        a, b = pivot, pivot
        for _ in range(_MAX_DOUBLINGS):
            if go_up:
                b = a + step
                if g(b) * g0 < 0.0:
                    lo, hi = a, b
                    break
                a = b
            else:
                b = a - step
                if g(b) * g0 < 0.0:
                    lo, hi = b, a
                    break
                a = b
            step *= 2.0
        else:
            raise SolverError("root bracket expansion failed")
        return optimize.brentq(g, lo, hi, xtol=1e-14, rtol=8.9e-16)


def location_model(zeta, mu: float, tau: float) -> ModelSpec:
    """Location mixture with shift ``mu`` and sparsity ``tau``."""
    return ModelSpec(Kind.LOCATION, _as_shape(zeta), tau, mu)


def scale_model(zeta, sigma: float, tau: float) -> ModelSpec:
    """Scale mixture with stretch ``sigma`` and sparsity ``tau``."""
    return ModelSpec(Kind.SCALE, _as_shape(zeta), tau, sigma)


def calibrate(kind, shape, params: CanonicalParams, m: int | None = None) -> ModelSpec:
    """Build the model whose Bayes-threshold power equals ``params.power``.

    Parameters
    ----------
    kind : Kind or str
    shape : SubbotinShape or float
    params : CanonicalParams
        Target power ``C`` plus either ``beta`` (with ``m``) or ``tau``.
    m : int, optional
        Problem size, needed only when ``params`` carries ``beta``.

    Returns
    -------
    ModelSpec
        Whose cached ``power`` equals ``C`` within 1e-8.

    Raises
    ------
    CalibrationError
        If no admissible effect attains the requested pair.
    """
    kind = _as_kind(kind)
    shape = _as_shape(shape)
    tau = params.resolve_tau(m)
    C = params.power
    z = shape.zeta
    log_tau = math.log(tau)
    if kind is Kind.LOCATION:
        if z <= 1.0:
            raise DomainError("location models require zeta > 1")
        w = shape.quantile(C)
        mu = (z * log_tau + abs(w) ** z) ** (1.0 / z) - w
        if not (math.isfinite(mu) and mu > 0.0):
            raise CalibrationError(
                f"no location effect attains power {C} at tau {tau}"
            )
        model = ModelSpec(kind, shape, tau, mu)
    else:
        w = shape.quantile(C / 2.0)

        def g(sigma):
            return w**z * (sigma**z - 1.0) / z - math.log(sigma) - log_tau

        lo, hi = 1.0 + 1e-9, 2.0
        for _ in range(_MAX_DOUBLINGS):
            if g(hi) > 0.0:
                break
            hi *= 2.0
            if not math.isfinite(hi):
                break
        else:
            pass
        if not (math.isfinite(hi) and g(hi) > 0.0):
            raise CalibrationError(
                f"no scale effect attains power {C} at tau {tau} (bracket not found)"
            )
        sigma = optimize.brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16)
        model = ModelSpec(kind, shape, tau, sigma)
    if abs(model.power - C) > 1e-8:
        raise CalibrationError(
            f"calibration missed the power target: got {model.power}, wanted {C}"
        )
    return model
