"""Tests for risk evaluation: Steck probabilities, exact FDR risk, bounds."""

import math
from fractions import Fraction

import numpy as np
import pytest

from fdrthresh.exceptions import CapacityError, DomainError, LevelError
from fdrthresh.model import CanonicalParams, calibrate, location_model, scale_model
from fdrthresh.risk import (
    BoundParams,
    bfdr_excess_bound,
    bfdr_ratio_floor,
    exact_fdr_risk,
    excess,
    explicit_excess_bound,
    fdr_excess_bound,
    rates,
    rejection_count_distribution,
    rho_rate,
    risk_det,
    risk_weighted,
    steck_prefix,
    steck_prefix_log,
    weighted_bayes_threshold,
)
from fdrthresh.threshold import Provenance, bfdr_threshold, q_opt

LAPLACE = scale_model(1.0, 4.0, 2.0)
GAUSS = location_model(2.0, math.sqrt(2.0 * math.log(5.0)), 5.0)


def psi_exact(bounds):
    """P(U_(1) <= b_1, ..., U_(n) <= b_n) by exact iterated integration.

    Maintains the polynomial u -> vol{u <= u_k <= ... <= u_n, u_i <= b_i}
    while integrating coordinates from the top down; all arithmetic is
    rational, so the result is exact for the given (dyadic) bounds.
    """
    poly = [Fraction(1)]
    for b in [Fraction(x) for x in reversed(list(bounds))]:
        anti = [Fraction(0)] + [c / (i + 1) for i, c in enumerate(poly)]
        const = sum(c * b**i for i, c in enumerate(anti))
        poly = [const] + [-c for c in anti[1:]]
    return math.factorial(len(list(bounds))) * poly[0]


def step_up_counts(pvalues, alpha):
    """Reference step-up count per row, independent of the package."""
    r, m = pvalues.shape
    ps = np.sort(pvalues, axis=1)
    ok = ps <= alpha * np.arange(1, m + 1) / m
    last = m - 1 - np.argmax(ok[:, ::-1], axis=1)
    return np.where(ok.any(axis=1), last + 1, 0)


# ----------------------------------------------------------- Steck recursion


def test_steck_worked_example():
    # P(U_(1) <= 0.3, U_(2) <= 0.6) for two uniforms: 0.6^2 - (0.6-0.3)^2 = 0.27
    assert psi_exact([Fraction(3, 10), Fraction(3, 5)]) == Fraction(27, 100)
    got = steck_prefix([0.3, 0.6])
    assert got.shape == (3,)
    assert got[0] == 1.0
    assert abs(got[1] - 0.3) <= 1e-14
    assert abs(got[2] - 0.27) <= 1e-14


def test_steck_against_exact_integration():
    rng = np.random.default_rng(20240811)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        bounds = np.sort(rng.random(n))
        got = steck_prefix(bounds)
        for j in range(n + 1):
            want = float(psi_exact(bounds[:j]))
            assert abs(got[j] - want) <= 1e-10


def test_steck_constant_bounds_power_law():
    # equal bounds t make every prefix probability exactly t^k
    for t in (0.1, 0.55, 0.9):
        got = steck_prefix(np.full(200, t))
        logs = steck_prefix_log(np.full(200, t))
        for k in range(201):
            want = t**k
            assert abs(got[k] - want) <= 1e-12 * want
            assert abs(logs[k] - k * math.log(t)) <= 1e-12 * abs(k * math.log(t)) + 1e-15


def test_steck_monte_carlo():
    n = 40
    bounds = np.minimum(1.0, 1.25 * np.arange(1, n + 1) / n + 0.02)
    want = steck_prefix(bounds)[n]
    rng = np.random.default_rng(7)
    reps = 300_000
    hits = np.all(np.sort(rng.random((reps, n)), axis=1) <= bounds, axis=1)
    p_hat = hits.mean()
    se = math.sqrt(p_hat * (1.0 - p_hat) / reps)
    assert abs(want - p_hat) <= 4.0 * se + 1e-12


def test_steck_log_matches_float():
    bounds = np.sort(np.random.default_rng(3).random(30))
    vals = steck_prefix(bounds)
    logs = steck_prefix_log(bounds)
    for v, lg in zip(vals, logs):
        if v > 1e-280:
            assert abs(lg - math.log(v)) <= 1e-12 * max(1.0, abs(math.log(v)))


def test_steck_degenerate_and_validation():
    assert steck_prefix([]).tolist() == [1.0]
    got = steck_prefix([0.0, 0.2, 0.9])
    assert got[0] == 1.0 and np.all(got[1:] == 0.0)
    assert steck_prefix_log([0.0, 0.5])[1] == -math.inf
    with pytest.raises(DomainError):
        steck_prefix([0.5, 0.3])
    with pytest.raises(DomainError):
        steck_prefix([-0.1, 0.5])
    with pytest.raises(DomainError):
        steck_prefix([0.5, 1.2])
    with pytest.raises(DomainError):
        steck_prefix([[0.1, 0.2]])
    with pytest.raises(DomainError):
        steck_prefix([0.1, math.nan])


def test_steck_tiny_first_bound_stays_accurate():
    # a small s_1 forces the recursion through huge cancelling terms; the
    # fixed-point width is chosen from s_1 so the output keeps full precision
    bounds = np.concatenate([[1e-6], np.linspace(0.4, 0.99, 120)])
    got = steck_prefix(bounds)
    # Psi_n <= P(U_(1) <= s_1) = 1 - (1 - s_1)^n
    assert 0.0 < got[-1] <= 1.0 - (1.0 - 1e-6) ** len(bounds)
    logs = steck_prefix_log(bounds)
    assert abs(logs[-1] - math.log(got[-1])) <= 1e-9


# ------------------------------------------------------------------- risks


def test_risk_det_worked_example():
    # Laplace scale sigma=4, tau=2: t^B = 1/16, F = 1/2 there
    assert abs(risk_det(LAPLACE, 0.0625) - 5.0 / 24.0) <= 1e-15
    grid = np.linspace(1e-9, 1.0 - 1e-9, 4001)
    vals = risk_det(LAPLACE, grid)
    assert np.all(vals >= risk_det(LAPLACE, LAPLACE.bayes_threshold) - 1e-12)
    assert abs(risk_det(LAPLACE, 0.0) - LAPLACE.pi1) <= 1e-15
    assert abs(risk_det(LAPLACE, 1.0) - LAPLACE.pi0) <= 1e-15


def test_weighted_risk_minimized_at_weighted_threshold():
    for model in (LAPLACE, GAUSS):
        for lam in (1.0, 1.3, 1.9):
            t_w = weighted_bayes_threshold(model, lam)
            grid = np.linspace(1e-7, 1.0 - 1e-7, 20001)
            vals = risk_weighted(model, grid, lam)
            best = grid[np.argmin(vals)]
            assert abs(best - t_w) <= 2.0 * (grid[1] - grid[0])
            assert np.all(vals >= risk_weighted(model, t_w, lam) - 1e-12)
    assert weighted_bayes_threshold(LAPLACE, 1.0) == LAPLACE.bayes_threshold


def test_weighted_risk_validation():
    assert risk_weighted(LAPLACE, 0.3, 1.0) == risk_det(LAPLACE, 0.3)
    with pytest.raises(DomainError):
        risk_weighted(LAPLACE, 0.3, 2.0)  # weight must stay below tau
    with pytest.raises(DomainError):
        risk_weighted(LAPLACE, 0.3, 0.5)
    with pytest.raises(DomainError):
        weighted_bayes_threshold(GAUSS, 5.0)


def test_excess_report():
    bayes = risk_det(GAUSS, GAUSS.bayes_threshold)
    rep = excess(GAUSS, bayes, Provenance.BAYES)
    assert rep.bayes_risk == bayes
    assert rep.excess_rel == 0.0
    rep2 = excess(GAUSS, 1.5 * bayes, Provenance.BFDR, {"note": 1.0})
    assert abs(rep2.excess_rel - 0.5) <= 1e-12
    assert rep2.bound_values == {"note": 1.0}


def test_bayes_risk_approaches_type_two_floor():
    # R(t^B) = pi1 (1 - C) (1 + C / ((1-C) q_opt)) -> pi1 (1 - C) as tau
    # grows; the location approach is slow (tau t^B ~ 1/mu^(zeta-1))
    for kind, zeta in (("scale", 1.0), ("scale", 2.0), ("location", 2.0), ("location", 3.0)):
        ratios = []
        for tau in (1e4, 1e8, 1e12):
            model = calibrate(kind, zeta, CanonicalParams(power=0.5, tau=tau))
            ratios.append(
                risk_det(model, model.bayes_threshold)
                / (model.pi1 * (1.0 - model.power))
            )
        assert ratios[0] > ratios[1] > ratios[2] >= 1.0
        assert ratios[2] <= 1.12


# ------------------------------------------------------------ exact FDR risk


@pytest.mark.parametrize("model", [LAPLACE, GAUSS])
@pytest.mark.parametrize("alpha", [0.1, 0.3])
def test_exact_fdr_risk_single_observation(model, alpha):
    # m=1 closed form: the threshold is alpha whatever the outcome
    want = model.pi0 * alpha + model.pi1 * (1.0 - model.alt_cdf(alpha))
    rep = exact_fdr_risk(model, 1, alpha)
    assert abs(rep.risk - want) <= 1e-12 * want
    assert rep.procedure is Provenance.FDR
    assert abs(rep.bayes_risk - risk_det(model, model.bayes_threshold)) <= 1e-15
    assert abs(rep.excess_rel - (rep.risk - rep.bayes_risk) / rep.bayes_risk) <= 1e-15


def test_rejection_count_distribution_two_observations():
    alpha, m = 0.3, 2
    g1 = LAPLACE.mixture_cdf(alpha / 2)
    g2 = LAPLACE.mixture_cdf(alpha)
    pmf = rejection_count_distribution(LAPLACE, m, alpha)
    assert abs(pmf[2] - g2**2) <= 1e-13
    assert abs(pmf[1] - 2.0 * g1 * (1.0 - g2)) <= 1e-13
    assert abs(pmf.sum() - 1.0) <= 1e-12


@pytest.mark.parametrize("model,alpha", [(LAPLACE, 0.1), (LAPLACE, 0.4), (GAUSS, 0.1), (GAUSS, 0.4)])
@pytest.mark.parametrize("m", [1, 2, 3, 5, 25, 200])
def test_rejection_counts_are_a_distribution(model, alpha, m):
    pmf = rejection_count_distribution(model, m, alpha)
    assert pmf.shape == (m + 1,)
    assert np.all(pmf >= 0.0)
    assert abs(pmf.sum() - 1.0) <= 1e-9


def test_rejection_count_distribution_monte_carlo():
    m, alpha, reps = 5, 0.3, 200_000
    rng = np.random.default_rng(11)
    labels = rng.random((reps, m)) < LAPLACE.pi1
    pv = np.where(labels, rng.random((reps, m)) ** 4.0, rng.random((reps, m)))
    counts = np.bincount(step_up_counts(pv, alpha), minlength=m + 1)
    pmf = rejection_count_distribution(LAPLACE, m, alpha)
    for k in range(m + 1):
        se = math.sqrt(max(pmf[k] * (1.0 - pmf[k]), 1e-12) / reps)
        assert abs(counts[k] / reps - pmf[k]) <= 4.0 * se


def test_exact_fdr_risk_monte_carlo():
    # Laplace scale alternative p-values sample as U^sigma (F(t) = t^(1/4))
    m, alpha, reps = 3, 0.3, 300_000
    rng = np.random.default_rng(29)
    labels = rng.random((reps, m)) < LAPLACE.pi1
    pv = np.where(labels, rng.random((reps, m)) ** 4.0, rng.random((reps, m)))
    khat = step_up_counts(pv, alpha)
    t_hat = alpha * np.maximum(khat, 1) / m
    draws = risk_det(LAPLACE, t_hat)
    mean, se = draws.mean(), draws.std() / math.sqrt(reps)
    rep = exact_fdr_risk(LAPLACE, m, alpha)
    assert abs(rep.risk - mean) <= 3.5 * se


def test_exact_fdr_risk_vanishing_level():
    # as alpha -> 0 nothing is rejected and the risk tends to pi1
    rep = exact_fdr_risk(GAUSS, 10, 1e-9)
    assert abs(rep.risk - GAUSS.pi1) <= 1e-3


def test_exact_fdr_risk_dense_strong_effects():
    # dense strong signals at m=1000 push the Steck pass through Psi values
    # near e^-218 against binomial multipliers near 2^995; the pin comes
    # from an interval-arithmetic evaluation of the same recursion
    model = calibrate("scale", 1.0, CanonicalParams(power=0.7, beta=0.2), 1000)
    rep = exact_fdr_risk(model, 1000, 0.05)
    assert abs(rep.risk - 0.07471209660519326) <= 1e-13
    pmf = rejection_count_distribution(model, 1000, 0.05)
    assert abs(pmf.sum() - 1.0) <= 1e-9


def test_exact_fdr_risk_validation():
    with pytest.raises(CapacityError):
        exact_fdr_risk(LAPLACE, 10_001, 0.1)
    with pytest.raises(DomainError):
        exact_fdr_risk(LAPLACE, 0, 0.1)
    with pytest.raises(DomainError):
        exact_fdr_risk(LAPLACE, 2.5, 0.1)
    for alpha in (0.0, 1.0, -0.2, math.nan):
        with pytest.raises(DomainError):
            exact_fdr_risk(LAPLACE, 5, alpha)


# ------------------------------------------------------------------- bounds


@pytest.mark.parametrize("model", [LAPLACE, GAUSS,
                                   scale_model(1.5, 2.5, 4.0),
                                   location_model(3.0, 1.2, 3.0)])
def test_bfdr_excess_bound_vanishes_at_optimal_level(model):
    alpha_opt = 1.0 / (1.0 + q_opt(model))
    bound = bfdr_excess_bound(model, alpha_opt)
    assert 0.0 <= bound <= 1e-8


@pytest.mark.parametrize("model", [LAPLACE, GAUSS, scale_model(2.0, 1.8, 3.0)])
@pytest.mark.parametrize("alpha", [0.05, 0.2, 0.45, 0.49])
def test_bfdr_bounds_dominate_truth(model, alpha):
    bayes = risk_det(model, model.bayes_threshold)
    t_star = bfdr_threshold(model, alpha).value
    actual = risk_det(model, t_star)
    assert actual - bayes <= bfdr_excess_bound(model, alpha) + 1e-10
    assert actual / bayes >= bfdr_ratio_floor(model, alpha) - 1e-10


@pytest.mark.parametrize("model", [LAPLACE, GAUSS])
@pytest.mark.parametrize("alpha", [0.1, 0.25])
def test_fdr_bound_dominates_exact_risk(model, alpha):
    rep = exact_fdr_risk(model, 25, alpha)
    bound = fdr_excess_bound(model, 25, alpha)
    assert rep.risk - rep.bayes_risk <= bound + 1e-10


def test_bfdr_bound_level_validation():
    with pytest.raises(LevelError):
        bfdr_excess_bound(LAPLACE, 0.55)  # needs alpha <= 1/2
    with pytest.raises(LevelError):
        bfdr_excess_bound(LAPLACE, LAPLACE.pi0 + 0.01)
    with pytest.raises(LevelError):
        bfdr_ratio_floor(LAPLACE, 0.7)  # pi0 = 2/3
    with pytest.raises(LevelError):
        fdr_excess_bound(LAPLACE, 10, 0.0)


def test_rates_worked_examples():
    r, K = rates(GAUSS)  # C = 0.5 so the quantile term drops out
    assert abs(r - math.sqrt(2.0 * math.log(5.0))) <= 1e-12
    assert abs(K - 1.0 / math.sqrt(2.0 * math.pi)) <= 1e-12
    r, K = rates(LAPLACE)
    assert abs(r - 2.0 * math.log(2.0)) <= 1e-12 * r
    assert abs(K - 0.5 * math.log(2.0)) <= 1e-12 * K


def test_explicit_bfdr_bound_worked_example():
    # sigma=4, tau=2: r = 2 log 2, K = (log 2)/2, q_opt = 4; at alpha = 0.2
    # the gap is -log(nu) = log 4 = r, so the bound collapses to pi1 K
    bound = explicit_excess_bound(LAPLACE, 100, 0.2, "bfdr")
    assert bound is not None
    assert abs(bound - math.log(2.0) / 6.0) <= 1e-12


def test_explicit_bounds_dominate_truth():
    for model in (LAPLACE, GAUSS):
        bayes = risk_det(model, model.bayes_threshold)
        for alpha in (0.1, 0.2, 0.3):
            got = explicit_excess_bound(model, 100, alpha, "bfdr")
            if got is not None:
                t_star = bfdr_threshold(model, alpha).value
                assert risk_det(model, t_star) - bayes <= got + 1e-10
            for case in (1, 2):
                got = explicit_excess_bound(
                    model, 25, alpha, "fdr", BoundParams(case_a=case)
                )
                if got is not None:
                    rep = exact_fdr_risk(model, 25, alpha)
                    assert rep.risk - rep.bayes_risk <= got + 1e-10


def test_explicit_bound_gates():
    # r/scale = 1.5 exactly for the worked model, so with case_a=2 the gate
    # log(1/(alpha q_opt)) + log m <= 1.5 admits m = 3 and rejects m = 4
    assert explicit_excess_bound(LAPLACE, 3, 0.2, "fdr", BoundParams(case_a=2)) is not None
    assert explicit_excess_bound(LAPLACE, 4, 0.2, "fdr", BoundParams(case_a=2)) is None
    # levels at or above 1/2 are inapplicable, not an error
    assert explicit_excess_bound(LAPLACE, 100, 0.5, "bfdr") is None
    assert explicit_excess_bound(LAPLACE, 100, 0.5, "fdr") is None
    # a nearly signal-free model has r too small for any gate
    weak = calibrate("location", 1.5, CanonicalParams(power=0.5, tau=1.01))
    assert explicit_excess_bound(weak, 100, 0.2, "bfdr") is None
    with pytest.raises(LevelError):
        explicit_excess_bound(LAPLACE, 100, 0.9, "bfdr")
    with pytest.raises(DomainError):
        explicit_excess_bound(LAPLACE, 100, 0.2, "both")
    with pytest.raises(DomainError):
        explicit_excess_bound(LAPLACE, 1, 0.2, "bfdr")


def test_bound_params_validation():
    with pytest.raises(DomainError):
        BoundParams(epsilon=0.0)
    with pytest.raises(DomainError):
        BoundParams(nu=1.0)
    with pytest.raises(DomainError):
        BoundParams(case_a=3)
    with pytest.raises(DomainError):
        BoundParams(weight=0.5)


def test_rho_rate():
    L = math.log(1e6)
    want = 0.05 + math.log(1.0 / (0.05 * L)) / L
    assert abs(rho_rate(10**6, 0.05, 1.0) - want) <= 1e-15
    assert 0.076 < rho_rate(10**6, 0.05, 1.0) < 0.078
    # once alpha exceeds 1/(log m)^g the correction term switches off
    assert rho_rate(10**6, 0.5, 1.0) == 0.5
    with pytest.raises(DomainError):
        rho_rate(2, 0.1, 1.0)
    with pytest.raises(DomainError):
        rho_rate(100, 1.5, 1.0)
    with pytest.raises(DomainError):
        rho_rate(100, 0.1, 0.0)
