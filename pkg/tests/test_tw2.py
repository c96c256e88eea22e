"""Tracy-Widom numerics: the two routes against each other and against
an independent library implementation of the Airy function."""

import numpy as np
import pytest
import scipy.special

from asepsim.tw2 import (
    airy,
    airy_kernel,
    distribution_table,
    f2_cdf,
    f2_cdf_painleve,
    f2_cdf_with_error,
    limit_law_current,
    limit_law_interpolant,
    quadrature_rule,
    tw2_density_mean,
)


# --- Airy function ---------------------------------------------------------

def test_airy_origin():
    val = airy(0.0)
    assert val.ai == pytest.approx(0.3550280538878172, abs=1e-15)
    assert val.ai_prime == pytest.approx(-0.2588194037928068, abs=1e-15)


def test_airy_at_one():
    val = airy(1.0)
    assert val.ai == pytest.approx(0.1352924163128814, abs=1e-13)
    assert val.ai_prime == pytest.approx(-0.1591474412967932, abs=1e-13)


def test_airy_against_scipy_everywhere():
    xs = np.concatenate(
        [
            np.linspace(-200.0, -8.6, 80),
            np.linspace(-8.4, 5.9, 160),  # series region, includes both switches
            np.linspace(6.0, 200.0, 80),
        ]
    )
    worst = 0.0
    for x in xs:
        mine = airy(float(x))
        ref_ai, ref_aip, _, _ = scipy.special.airy(x)
        worst = max(worst, abs(mine.ai - ref_ai), abs(mine.ai_prime - ref_aip))
    assert worst <= 1e-12


def test_airy_monotone_decay_right_of_one():
    xs = np.linspace(1.0, 25.0, 97)
    vals = [airy(float(x)).ai for x in xs]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.0


def test_airy_ode_residual_by_second_differences():
    h = 1e-4
    for x in np.linspace(-5.0, 5.0, 21):
        second = (airy(x + h).ai - 2.0 * airy(x).ai + airy(x - h).ai) / h**2
        assert abs(second - x * airy(x).ai) <= 1e-6


def test_airy_domain_guard():
    with pytest.raises(ValueError):
        airy(200.5)
    with pytest.raises(ValueError):
        airy(-1e3)


# --- Airy kernel -----------------------------------------------------------

def test_kernel_diagonal_value():
    assert airy_kernel(0.0, 0.0) == pytest.approx(0.06698748377966399, abs=1e-12)


def test_kernel_off_diagonal_value():
    assert airy_kernel(0.0, 1.0) == pytest.approx(0.021485503837037977, abs=1e-12)


def test_kernel_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(25):
        x, y = rng.uniform(-6.0, 6.0, size=2)
        assert airy_kernel(x, y) == pytest.approx(airy_kernel(y, x), abs=1e-14)


def test_kernel_continuous_across_diagonal():
    x = 1.3
    assert airy_kernel(x, x + 1e-7) == pytest.approx(airy_kernel(x, x), abs=1e-7)


# --- quadrature rule -------------------------------------------------------

def test_quadrature_rule_weights():
    rule = quadrature_rule(60)
    assert np.all(rule.weights > 0.0)
    assert np.all(rule.jacobian > 0.0)
    assert rule.weights.sum() == pytest.approx(2.0, abs=1e-12)


def test_quadrature_rule_rejects_tiny_order():
    with pytest.raises(ValueError):
        quadrature_rule(8)


# --- F2, both routes -------------------------------------------------------

def test_f2_saturates_right():
    assert abs(f2_cdf(8.0) - 1.0) <= 1e-10


def test_f2_vanishes_left():
    assert f2_cdf(-8.0) < 1e-7


def test_f2_at_zero_both_routes():
    # value pinned by the agreement of two independent routes
    assert f2_cdf(0.0) == pytest.approx(0.9693728283552624, abs=1e-10)
    assert f2_cdf_painleve(0.0) == pytest.approx(0.9693728283552624, abs=1e-10)


def test_f2_self_convergence():
    for s in np.arange(-6.0, 6.01, 0.5):
        assert abs(f2_cdf(float(s), 60) - f2_cdf(float(s), 120)) <= 1e-10


def test_route_agreement_on_integers():
    for s in range(-5, 6):
        assert abs(f2_cdf(float(s), 60) - f2_cdf_painleve(float(s))) <= 1e-8


def test_f2_with_error_flags_convergence():
    value, err, converged = f2_cdf_with_error(0.0, 60)
    assert converged
    assert err <= 1e-10
    assert value == pytest.approx(0.9693728283552624, abs=1e-10)


def test_painleve_boundary_and_domain():
    assert f2_cdf_painleve(10.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        f2_cdf_painleve(-10.5)


def test_density_mean_regression_constant():
    mean = tw2_density_mean()
    assert mean == pytest.approx(-1.771087, abs=1e-5)
    assert mean == pytest.approx(-1.7710868074, abs=1e-7)


# --- limit law -------------------------------------------------------------

def test_limit_law_at_zero():
    assert limit_law_current(0.0) == pytest.approx(0.030627171644736, abs=1e-10)


def test_limit_law_is_a_cdf():
    grid = np.arange(-8.0, 8.01, 0.25)
    vals = np.array([limit_law_current(float(s)) for s in grid])
    assert np.all(np.diff(vals) >= -1e-12)
    assert vals[0] <= 1e-10
    assert vals[-1] >= 1.0 - 1e-10
    assert np.all((vals >= 0.0) & (vals <= 1.0))


def test_limit_law_interpolant_matches_direct():
    law = limit_law_interpolant()
    for s in (-3.7, -1.2, 0.0, 0.9, 2.3, 4.8):
        assert law(s) == pytest.approx(limit_law_current(s), abs=1e-8)
    assert law(-12.0) == 0.0
    assert law(12.0) == 1.0


def test_distribution_table_columns():
    table = distribution_table(np.arange(-2.0, 2.01, 0.5), order=40)
    assert table.s_values.shape == table.f2.shape == table.limit_law.shape
    assert np.all(np.diff(table.f2) > 0.0)
    assert np.all(np.diff(table.limit_law) > 0.0)
    assert np.all((table.f2 >= 0.0) & (table.f2 <= 1.0))
