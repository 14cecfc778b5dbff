"""Tests for the Subbotin density/tail/quantile evaluators.

Reference values were frozen from an independent 40-digit mpmath evaluation
(regularized incomplete gamma for the tail, bisection for the quantile).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fdrthresh import DomainError, SubbotinShape

# (zeta, u, upper_tail) frozen from mpmath
TAIL_ORACLE = [
    (1.5, 1.0, 0.1699012223533534516),
    (1.5, -0.4, 0.65824303560103026931),
    (1.5, 6.0, 9.2983304857965654217e-6),
    (3.0, 0.7, 0.23576031800545974762),
    (3.0, 2.5, 3.0588700233652252223e-4),
    (2.0, 1.0, 0.15865525393145705141),
]

# (zeta, p, quantile) frozen from mpmath
QUANTILE_ORACLE = [
    (1.5, 1e-6, 6.8554177871237850248),
    (1.5, 0.31, 0.49163446451682350589),
    (3.0, 0.05, 1.4274638979175980953),
    (3.0, 0.75, -0.6592720795695996167),
    (2.0, 0.025, 1.9599639845400542355),
]

# (zeta, u, log upper_tail) in the regime where the tail itself underflows
LOG_TAIL_ORACLE = [
    (1.5, 200.0, -1889.1285609345266434),
    (3.0, 25.0, -5215.7173725853604566),
]


def test_normalizer_closed_forms():
    assert SubbotinShape(1.0).log_normalizer == pytest.approx(math.log(2.0), abs=1e-15)
    assert SubbotinShape(2.0).log_normalizer == pytest.approx(
        0.5 * math.log(2.0 * math.pi), abs=1e-15
    )
    assert SubbotinShape(1.5).log_normalizer == pytest.approx(
        0.8611424196714140841, abs=1e-15
    )


@pytest.mark.parametrize("zeta,u,expected", TAIL_ORACLE)
def test_upper_tail_oracle(zeta, u, expected):
    assert SubbotinShape(zeta).upper_tail(u) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("zeta,p,expected", QUANTILE_ORACLE)
def test_quantile_oracle(zeta, p, expected):
    assert SubbotinShape(zeta).quantile(p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("zeta,u,expected", LOG_TAIL_ORACLE)
def test_log_upper_tail_underflow_regime(zeta, u, expected):
    # upper_tail itself is 0.0 in floats here; the log path must still work
    shape = SubbotinShape(zeta)
    assert shape.upper_tail(u) == 0.0
    assert shape.log_upper_tail(u) == pytest.approx(expected, rel=1e-13)


def test_laplace_closed_identities():
    shape = SubbotinShape(1.0)
    assert shape.upper_tail(1.0) == pytest.approx(0.5 * math.exp(-1.0), abs=1e-16)
    assert shape.upper_tail(-1.0) == pytest.approx(1.0 - 0.5 * math.exp(-1.0), abs=1e-16)
    assert shape.quantile(0.25) == pytest.approx(math.log(2.0), abs=1e-15)
    assert shape.density(0.0) == pytest.approx(0.5, abs=1e-16)


@pytest.mark.parametrize("zeta", [1.0, 2.0])
def test_closed_forms_match_gamma_path(zeta):
    # the dedicated zeta = 1, 2 branches and the incomplete-gamma path must
    # agree to 1e-12 wherever both are well conditioned
    shape = SubbotinShape(zeta)
    u = np.linspace(-6.0, 12.0, 181)
    assert np.max(np.abs(shape.upper_tail(u) - shape._upper_tail_gamma(u))) < 1e-12
    p = np.linspace(0.001, 0.999, 97)
    assert np.max(np.abs(shape.quantile(p) - shape._quantile_gamma(p))) < 1e-12


@pytest.mark.parametrize("zeta", [1.0, 1.3, 1.5, 2.0, 3.0, 3.7])
def test_density_integrates_to_one(zeta):
    shape = SubbotinShape(zeta)
    total, err = integrate.quad(shape.density, -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("zeta", [1.0, 1.5, 2.0, 3.0])
def test_tail_is_integral_of_density(zeta):
    # split at 0 where |x|^zeta has a kink, so quad reaches full accuracy
    shape = SubbotinShape(zeta)
    for u in [-1.7, -0.2, 0.0, 0.9, 2.4]:
        part, _ = integrate.quad(shape.density, max(u, 0.0), np.inf, epsabs=1e-13)
        if u < 0.0:
            part += integrate.quad(shape.density, u, 0.0, epsabs=1e-13)[0]
        assert part == pytest.approx(shape.upper_tail(u), abs=1e-11)


@pytest.mark.parametrize("zeta", [1.0, 1.5, 2.0, 2.7])
def test_symmetry(zeta):
    shape = SubbotinShape(zeta)
    u = np.linspace(-8.0, 8.0, 161)
    assert np.max(np.abs(shape.upper_tail(u) + shape.upper_tail(-u) - 1.0)) < 1e-14


@pytest.mark.parametrize(
    "zeta,uneg,umax",
    [(1.0, -11.0, 600.0), (1.5, -6.0, 80.0), (2.0, -4.5, 35.0), (3.0, -3.0, 10.0)],
)
def test_roundtrip_u_to_p_to_u(zeta, uneg, umax):
    # uneg stops where quantile(p) near p -> 1 becomes ill conditioned in
    # float64 (spacing near 1 divided by a vanishing density)
    shape = SubbotinShape(zeta)
    u = np.concatenate([np.linspace(uneg, 6.0, 121), np.geomspace(1e-3, umax, 60)])
    back = shape.quantile(shape.upper_tail(u))
    assert np.max(np.abs(back - u) / np.maximum(1.0, np.abs(u))) < 1e-10


@pytest.mark.parametrize("zeta", [1.0, 1.5, 2.0, 3.0])
def test_roundtrip_p_to_u_to_p(zeta):
    shape = SubbotinShape(zeta)
    p = np.concatenate([np.geomspace(1e-280, 0.5, 80), 1.0 - np.geomspace(1e-12, 0.5, 40)])
    back = shape.upper_tail(shape.quantile(p))
    assert np.max(np.abs(back - p) / p) < 1e-10


@pytest.mark.parametrize("zeta", [1.0, 1.4, 2.0, 3.0])
def test_log_evaluators_consistent(zeta):
    shape = SubbotinShape(zeta)
    u = np.linspace(-5.0, 9.0, 57)
    assert np.allclose(np.exp(shape.log_upper_tail(u)), shape.upper_tail(u), rtol=1e-12)
    assert np.allclose(np.exp(shape.log_density(u)), shape.density(u), rtol=1e-13)


@given(
    zeta=st.sampled_from([1.0, 1.5, 2.0, 2.5]),
    p=st.floats(min_value=1e-12, max_value=1.0 - 1e-12),
)
@settings(max_examples=150, deadline=None)
def test_roundtrip_property(zeta, p):
    shape = SubbotinShape(zeta)
    assert shape.upper_tail(shape.quantile(p)) == pytest.approx(p, rel=1e-9)


def test_quantile_at_half_is_zero():
    for zeta in [1.0, 1.5, 2.0, 3.0]:
        assert abs(SubbotinShape(zeta).quantile(0.5)) < 1e-14


def test_array_shapes_and_scalar_types():
    shape = SubbotinShape(1.5)
    u = np.array([[0.1, 0.2], [0.3, 0.4]])
    assert shape.upper_tail(u).shape == (2, 2)
    assert isinstance(shape.upper_tail(0.3), float)
    assert isinstance(shape.quantile(0.3), float)


def test_domain_validation():
    with pytest.raises(DomainError):
        SubbotinShape(0.8)
    with pytest.raises(DomainError):
        SubbotinShape(float("nan"))
    shape = SubbotinShape(1.5)
    with pytest.raises(DomainError):
        shape.quantile(0.0)
    with pytest.raises(DomainError):
        shape.quantile(1.0)
    with pytest.raises(DomainError):
        shape.upper_tail(float("inf"))
