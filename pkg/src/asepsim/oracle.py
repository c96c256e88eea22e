"""Brute-force transient law of small exclusion systems by uniformization.

The state space is every strictly increasing n-tuple inside a finite lattice
window; jumps that would leave the window are disabled, and the resulting
modified process is provably close to the unbounded one via a Poisson tail
bound on how many jumps any particle can make (see
:func:`boundary_error_bound`).  Used to certify the event simulator, not to
scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
from scipy.stats import poisson

from .core import ModelParameters

__all__ = [
    "GeneratorMatrix",
    "StateSpace",
    "boundary_error_bound",
    "build_generator",
    "build_state_space",
    "exact_current_law",
    "transient_distribution",
]

_MAX_STATES = 50_000
_SERIES_TAIL = 1e-12
_MAX_SERIES_TERMS = 100_000


@dataclass(frozen=True)
class StateSpace:
    """Lexicographic enumeration of all n-particle configurations in a window."""

    window: tuple[int, int]
    n_particles: int
    states: tuple[tuple[int, ...], ...]
    index: dict[tuple[int, ...], int]


def build_state_space(window: tuple[int, int], n_particles: int) -> StateSpace:
    lo, hi = int(window[0]), int(window[1])
    width = hi - lo + 1
    if width < n_particles:
        raise ValueError(f"window {window} cannot hold {n_particles} particles")
    size = comb(width, n_particles)
    if size > _MAX_STATES:
        raise ValueError(f"state space of {size} states exceeds the {_MAX_STATES} cap")
    states = tuple(combinations(range(lo, hi + 1), n_particles))
    return StateSpace(
        window=(lo, hi),
        n_particles=n_particles,
        states=states,
        index={s: i for i, s in enumerate(states)},
    )


@dataclass(frozen=True)
class GeneratorMatrix:
    """Dense rate matrix of the window-restricted process, plus the
    uniformization constant (n suffices: total exit rate <= n(p+q) = n)."""

    space: StateSpace
    params: ModelParameters
    q_matrix: np.ndarray
    uniformization_rate: float
    initial_index: int


def build_generator(
    window: tuple[int, int], n_particles: int, params: ModelParameters
) -> GeneratorMatrix:
    space = build_state_space(window, n_particles)
    lo, hi = space.window
    init = tuple(range(1, n_particles + 1))
    if init not in space.index:
        raise ValueError(f"step start {init} does not fit in window {space.window}")

    size = len(space.states)
    q = np.zeros((size, size))
    for si, state in enumerate(space.states):
        occupied = set(state)
        for j, pos in enumerate(state):
            right = pos + 1
            if right <= hi and right not in occupied:
                new = state[:j] + (right,) + state[j + 1 :]
                q[si, space.index[new]] += params.p
            left = pos - 1
            if left >= lo and left not in occupied:
                new = state[:j] + (left,) + state[j + 1 :]
                q[si, space.index[new]] += params.q
        q[si, si] = -q[si].sum()
    return GeneratorMatrix(
        space=space,
        params=params,
        q_matrix=q,
        uniformization_rate=float(n_particles),
        initial_index=space.index[init],
    )


def transient_distribution(gen: GeneratorMatrix, t_phys: float) -> np.ndarray:
    """exp(Q t) delta_init as a Poisson mixture of powers of I + Q/Lambda.

    The series is truncated once the accumulated Poisson weight reaches
    1 - 1e-12, so the result sums to one within 1e-10.
    """
    if t_phys < 0.0:
        raise ValueError(f"physical time must be nonnegative, got {t_phys}")
    rate = gen.uniformization_rate
    lam_t = rate * t_phys
    size = len(gen.space.states)
    v = np.zeros(size)
    v[gen.initial_index] = 1.0
    if lam_t == 0.0:
        return v
    if lam_t > 600.0:
        raise RuntimeError(
            f"uniformization horizon Lambda*t = {lam_t:.1f} too large; use a smaller time"
        )

    stochastic = np.eye(size) + gen.q_matrix / rate
    weight = np.exp(-lam_t)
    total = weight
    out = weight * v
    k = 0
    while total < 1.0 - _SERIES_TAIL:
        k += 1
        if k > _MAX_SERIES_TERMS:
            raise RuntimeError("uniformization series exceeded the term cap")
        v = v @ stochastic
        weight *= lam_t / k
        total += weight
        out += weight * v
    return out


def exact_current_law(gen: GeneratorMatrix, x: int, t_phys: float) -> np.ndarray:
    """Pushforward of the transient law under state -> #{particles <= x};
    entry m is P(current at x equals m)."""
    probs = transient_distribution(gen, t_phys)
    n = gen.space.n_particles
    counts = np.asarray([sum(1 for pos in state if pos <= x) for state in gen.space.states])
    return np.bincount(counts, weights=probs, minlength=n + 1)


def boundary_error_bound(space: StateSpace, t_phys: float) -> float:
    """Total variation certificate between the window-restricted process and
    the unbounded n-particle process, both started from the step state.

    The coupled processes first differ when some particle attempts a jump
    out of the window, which needs at least k attempts of that particle,
    where k is the smallest exit distance from the step start; per-particle
    attempts are Poisson(t).
    """
    lo, hi = space.window
    n = space.n_particles
    k_left = 1 - (lo - 1)  # leftmost particle starts at 1
    k_right = (hi + 1) - n  # rightmost particle starts at n
    k = min(k_left, k_right)
    return float(n * poisson.sf(k - 1, t_phys))


def state_index_of(space: StateSpace, positions: np.ndarray) -> int:
    """Index of a configuration in the state space, or -1 if any particle
    lies outside the window."""
    lo, hi = space.window
    if positions[0] < lo or positions[-1] > hi:
        return -1
    return space.index[tuple(int(p) for p in positions)]
