"""Uniformization oracle: generator structure and transient laws."""

import numpy as np
import pytest
from scipy.stats import poisson

from asepsim.core import ModelParameters
from asepsim.oracle import (
    boundary_error_bound,
    build_generator,
    build_state_space,
    exact_current_law,
    state_index_of,
    transient_distribution,
)


def test_state_space_enumeration():
    space = build_state_space((-3, 5), 3)
    assert len(space.states) == 84  # C(9, 3)
    assert space.states[0] == (-3, -2, -1)
    assert space.states[-1] == (3, 4, 5)
    assert list(space.states) == sorted(space.states)


def test_state_space_cap():
    with pytest.raises(ValueError):
        build_state_space((0, 59), 10)


def test_generator_single_particle_absorbing_window():
    gen = build_generator((0, 1), 1, ModelParameters(0.0, 1.0))
    space = gen.space
    i1 = space.index[(1,)]
    i0 = space.index[(0,)]
    assert gen.q_matrix[i1, i0] == pytest.approx(1.0)
    assert gen.q_matrix[i1, i1] == pytest.approx(-1.0)
    # left jump out of the window is disabled: state (0,) has no exits
    assert np.allclose(gen.q_matrix[i0], 0.0)


def test_generator_blocked_move_and_exit_rate():
    params = ModelParameters(0.25, 0.75)
    gen = build_generator((-1, 3), 2, params)
    idx = gen.space.index[(1, 2)]
    # particle at 1 can go left (q) or be blocked right; particle at 2 can
    # go right (p) or be blocked left: total exit rate q + p = 1
    assert gen.q_matrix[idx, idx] == pytest.approx(-1.0)
    assert gen.q_matrix[idx, gen.space.index[(0, 2)]] == pytest.approx(0.75)
    assert gen.q_matrix[idx, gen.space.index[(1, 3)]] == pytest.approx(0.25)


def test_generator_rows_sum_to_zero():
    gen = build_generator((-4, 6), 3, ModelParameters(0.25, 0.75))
    assert np.max(np.abs(gen.q_matrix.sum(axis=1))) <= 1e-12


def test_transient_at_zero_time_is_point_mass():
    gen = build_generator((-3, 5), 3, ModelParameters(0.25, 0.75))
    probs = transient_distribution(gen, 0.0)
    assert probs[gen.initial_index] == 1.0
    assert probs.sum() == 1.0


def test_transient_free_walker_matches_poisson():
    gen = build_generator((-12, 2), 1, ModelParameters(0.0, 1.0))
    probs = transient_distribution(gen, 0.5)
    sites = np.array([s[0] for s in gen.space.states])
    exact = poisson.pmf(1 - sites, 0.5)
    assert np.max(np.abs(probs - exact)) <= 1e-10


def test_transient_mass_conservation():
    gen = build_generator((-6, 8), 3, ModelParameters(0.25, 0.75))
    probs = transient_distribution(gen, 1.0)
    assert probs.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all(probs >= 0.0)


def test_transient_rejects_negative_time():
    gen = build_generator((0, 3), 1, ModelParameters(0.25, 0.75))
    with pytest.raises(ValueError):
        transient_distribution(gen, -0.5)


def test_exact_current_law_step_start():
    gen = build_generator((-3, 5), 3, ModelParameters(0.25, 0.75))
    pmf = exact_current_law(gen, 0, 0.0)
    assert pmf[0] == 1.0
    assert pmf.sum() == pytest.approx(1.0)


def test_exact_current_law_free_walker():
    gen = build_generator((-20, 1), 1, ModelParameters(0.0, 1.0))
    pmf = exact_current_law(gen, 0, 0.5)
    # P(current = 1) = P(Poisson(0.5) >= 1)
    assert pmf[1] == pytest.approx(1.0 - np.exp(-0.5), abs=1e-10)
    assert pmf.sum() == pytest.approx(1.0, abs=1e-10)


def test_boundary_error_bound_values():
    space = build_state_space((-3, 5), 3)
    # min exit distance is 3 (rightmost particle from 3 to 6)
    expected = 3.0 * poisson.sf(2, 0.5)
    assert boundary_error_bound(space, 0.5) == pytest.approx(expected, rel=1e-12)
    wide = build_state_space((-10, 13), 3)
    assert boundary_error_bound(wide, 0.5) <= 1e-8


def test_state_index_of_escape_detection():
    space = build_state_space((-3, 5), 3)
    assert state_index_of(space, np.array([1, 2, 3])) == space.index[(1, 2, 3)]
    assert state_index_of(space, np.array([-4, 2, 3])) == -1
    assert state_index_of(space, np.array([1, 2, 6])) == -1
