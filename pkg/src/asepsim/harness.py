"""Ensemble orchestration and statistics for the current-fluctuation law.

The headline experiment runs M independent trajectories to physical time
t/gamma, reads off the total current at site floor(-v t), normalizes by the
KPZ constants, and measures the Kolmogorov-Smirnov distance to the limit
law 1 - F2(-s).  The same machinery drives the strong-law check (plain
physical time t), the tagged-particle position form, the pathwise event
identity, and the chi-square certification against the exact small-system
oracle.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import chi2 as chi2_dist

from . import oracle as oracle_mod
from .core import ModelParameters, make_trajectory, run_to, truncation_size
from .scaling import kpz_constants, scaling_constants, strong_law_density
from .tw2 import limit_law_interpolant

__all__ = [
    "EmpiricalCdf",
    "EnsembleConfig",
    "EnsembleSummary",
    "OracleCertification",
    "certify_against_oracle",
    "count_identity_holds",
    "empirical_cdf",
    "ks_distance",
    "normalize_current",
    "position_form_check",
    "run_ensemble",
    "site_of",
    "strong_law_check",
    "verify_event_identity",
]

_EVENT_CAP = 10_000_000_000


@dataclass(frozen=True)
class EnsembleConfig:
    """Arguments of the limit-law experiment.

    ``t`` is the time parameter of the scaling theory; trajectories run to
    physical time t/gamma and the observation site is floor(-v t).
    """

    params: ModelParameters
    v: float = 0.0
    t: float = 200.0
    trajectories: int = 2000
    seed: int = 1
    s_grid: tuple[float, ...] | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if not abs(self.v) < 1.0:
            raise ValueError(f"scaled position must satisfy |v| < 1, got {self.v}")
        if self.trajectories < 1:
            raise ValueError(f"ensemble size must be at least 1, got {self.trajectories}")
        if self.t < 0.0:
            raise ValueError(f"time parameter must be nonnegative, got {self.t}")


@dataclass
class EnsembleSummary:
    """Per-trajectory currents plus the aggregated statistics."""

    currents: np.ndarray
    normalized: np.ndarray
    ks_distance: float
    moments: dict[str, float]
    truncation: int
    site: int
    t_phys: float
    wall_seconds: float = field(default=0.0, repr=False)


def site_of(v: float, t: float) -> int:
    """Observation site floor(-v t)."""
    return int(math.floor(-v * t))


def _chunk_worker(args) -> tuple[int, np.ndarray]:
    p, q, n, t_phys, seed, start, stop = args
    params = ModelParameters(p, q)
    out = np.empty((stop - start, n), dtype=np.int64)
    for i in range(start, stop):
        state = make_trajectory(n, seed, i)
        run_to(state, t_phys, params)
        out[i - start] = state.configuration.positions
    return start, out


def _final_positions(
    params: ModelParameters,
    n_particles: int,
    t_phys: float,
    trajectories: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """(M, N) matrix of final positions; row i comes from substream i, so the
    result is independent of worker count and chunking."""
    expected_events = n_particles * t_phys * trajectories
    if expected_events > _EVENT_CAP:
        raise ValueError(
            f"run would need ~{expected_events:.2e} events (cap {_EVENT_CAP:.0e}); "
            "lower the time parameter or the ensemble size"
        )
    out = np.empty((trajectories, n_particles), dtype=np.int64)
    if workers <= 1:
        _start, block = _chunk_worker(
            (params.p, params.q, n_particles, t_phys, seed, 0, trajectories)
        )
        out[:] = block
        return out
    chunk = max(1, math.ceil(trajectories / (4 * workers)))
    jobs = [
        (params.p, params.q, n_particles, t_phys, seed, lo, min(lo + chunk, trajectories))
        for lo in range(0, trajectories, chunk)
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for start, block in pool.map(_chunk_worker, jobs):
            out[start : start + block.shape[0]] = block
    return out


def normalize_current(current, v: float, t: float):
    """(I - a1 t) / (a2 t^{1/3}) with the constants at scaled position v."""
    if t <= 0.0:
        raise ValueError(f"time parameter must be positive, got {t}")
    a1, a2 = scaling_constants(v)
    return (np.asarray(current, dtype=float) - a1 * t) / (a2 * t ** (1.0 / 3.0))


class EmpiricalCdf:
    """Right-continuous empirical distribution with O(log M) queries."""

    def __init__(self, samples: np.ndarray):
        self.samples = np.sort(np.asarray(samples, dtype=float))
        self.size = self.samples.size

    def __call__(self, s):
        return np.searchsorted(self.samples, s, side="right") / self.size

    def left_limit(self, s):
        return np.searchsorted(self.samples, s, side="left") / self.size


def empirical_cdf(samples) -> EmpiricalCdf:
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("empirical CDF needs at least one sample")
    return EmpiricalCdf(samples)


def ks_distance(ecdf: EmpiricalCdf, cdf: Callable) -> float:
    """sup over sample points of max(|ecdf(s) - cdf(s)|, |ecdf(s-) - cdf(s)|)."""
    xs = ecdf.samples
    try:
        ref = np.asarray(cdf(xs), dtype=float)
        if ref.shape != xs.shape:
            raise TypeError
    except TypeError:
        ref = np.asarray([float(cdf(x)) for x in xs])
    m = xs.size
    upper = np.arange(1, m + 1) / m
    lower = np.arange(0, m) / m
    return float(np.max(np.maximum(np.abs(upper - ref), np.abs(lower - ref))))


def _sample_moments(values: np.ndarray) -> dict[str, float]:
    mean = float(np.mean(values))
    centered = values - mean
    var = float(np.var(values, ddof=1)) if values.size > 1 else 0.0
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    skew = m3 / m2**1.5 if m2 > 0.0 else 0.0
    return {"mean": mean, "var": var, "skew": skew}


def run_ensemble(config: EnsembleConfig) -> EnsembleSummary:
    """Run the limit-law experiment described by ``config``."""
    gamma = config.params.gamma
    if gamma <= 0.0:
        raise ValueError("limit-law runs need a positive drift (p < q)")
    started = time.perf_counter()
    x = site_of(config.v, config.t)
    t_phys = config.t / gamma
    n = truncation_size(t_phys, x)
    positions = _final_positions(
        config.params, n, t_phys, config.trajectories, config.seed, config.workers
    )
    counts = np.sum(positions <= x, axis=1).astype(np.int64)
    # At a positive site the total current is the count shifted by the site
    # index (everything at or left of a positive site starts there).
    currents = counts - max(x, 0)
    if config.t > 0.0:
        normalized = normalize_current(currents, config.v, config.t)
    else:
        normalized = np.zeros(config.trajectories)
    ks = ks_distance(empirical_cdf(normalized), limit_law_interpolant())
    return EnsembleSummary(
        currents=currents,
        normalized=normalized,
        ks_distance=ks,
        moments=_sample_moments(normalized),
        truncation=n,
        site=x,
        t_phys=t_phys,
        wall_seconds=time.perf_counter() - started,
    )


def verify_event_identity(positions: np.ndarray, x: int) -> bool:
    """Exact pathwise identity between current and particle positions.

    Checks, for every rank m, that current(x) >= m iff the m-th particle
    sits at or left of x, and that the current value pins the straddling
    pair x_I <= x < x_{I+1}.
    """
    positions = np.asarray(positions)
    n = positions.size
    current = int(np.searchsorted(positions, x, side="right"))
    ranks_hit = positions <= x
    expected = np.arange(1, n + 1) <= current
    if not np.array_equal(ranks_hit, expected):
        return False
    if current > 0 and positions[current - 1] > x:
        return False
    if current < n and positions[current] <= x:
        return False
    return True


def count_identity_holds(positions: np.ndarray, x: int) -> bool:
    """Ensemble count identity: for every m, the number of trajectories with
    current <= m plus the number with x_{m+1} <= x equals the ensemble size
    exactly."""
    positions = np.asarray(positions)
    m_traj, n = positions.shape
    counts = np.sum(positions <= x, axis=1)
    for m in range(0, n):
        le_m = int(np.sum(counts <= m))
        hit = int(np.sum(positions[:, m] <= x))
        if le_m + hit != m_traj:
            return False
    return True


def position_form_check(
    config: EnsembleConfig,
    sigma: float,
    s: float,
    positions: np.ndarray | None = None,
) -> float:
    """Empirical P(x_m(t/gamma) <= c1 t + s c2 t^{1/3}) for m = round(sigma t)."""
    gamma = config.params.gamma
    if gamma <= 0.0:
        raise ValueError("position-form runs need a positive drift (p < q)")
    t = config.t
    m = int(round(sigma * t))
    t_phys = t / gamma
    n = truncation_size(t_phys, 0)
    if not 1 <= m <= n:
        raise ValueError(f"rank m={m} outside the particle range [1, {n}]")
    c1, c2 = kpz_constants(sigma)
    threshold = math.floor(c1 * t + s * c2 * t ** (1.0 / 3.0))
    if positions is None:
        positions = _final_positions(
            config.params, n, t_phys, config.trajectories, config.seed, config.workers
        )
    return float(np.mean(positions[:, m - 1] <= threshold))


def _strong_law_stats(config: EnsembleConfig, c: float) -> dict[str, float]:
    gamma = config.params.gamma
    limit = strong_law_density(c, gamma)
    t = config.t
    if t <= 0.0:
        raise ValueError("strong-law runs need a positive time")
    x = int(math.floor(-c * t))
    n = truncation_size(t, x)
    positions = _final_positions(
        config.params, n, t, config.trajectories, config.seed, config.workers
    )
    rates = np.sum(positions <= x, axis=1) / t
    mean = float(np.mean(rates))
    std_err = float(np.std(rates, ddof=1) / math.sqrt(config.trajectories))
    return {
        "mean_rate": mean,
        "limit": limit,
        "deviation": abs(mean - limit),
        "std_error": std_err,
        "site": float(x),
        "trajectories": float(config.trajectories),
    }


def strong_law_check(config: EnsembleConfig, c: float) -> float:
    """|mean of current/t - (gamma-c)^2/(4 gamma)| at site floor(-c t).

    Runs plain physical time t (no gamma time change), matching the
    hydrodynamic parametrization.
    """
    return _strong_law_stats(config, c)["deviation"]


@dataclass
class OracleCertification:
    """Result of the chi-square certification of the simulator."""

    chi2: float
    dof: int
    critical: float
    passed: bool
    certificate: float
    escaped: int
    categories: int
    trajectories: int


def certify_against_oracle(
    params: ModelParameters,
    n_particles: int,
    window: tuple[int, int],
    t_phys: float,
    trajectories: int,
    seed: int,
    min_expected: float = 10.0,
    significance: float = 0.01,
    workers: int = 1,
) -> OracleCertification:
    """Chi-square goodness of fit of simulated configuration frequencies
    against the uniformization law of the window-restricted process.

    States whose expected count falls below ``min_expected`` are merged into
    one remainder category (binning decided from the oracle law alone, never
    from the data); trajectories that leave the window land in the same
    remainder, which is legitimate up to the reported coupling certificate.
    """
    gen = oracle_mod.build_generator(window, n_particles, params)
    probs = oracle_mod.transient_distribution(gen, t_phys)
    certificate = oracle_mod.boundary_error_bound(gen.space, t_phys)

    positions = _final_positions(params, n_particles, t_phys, trajectories, seed, workers)
    observed = np.zeros(len(gen.space.states), dtype=np.int64)
    escaped = 0
    for row in positions:
        idx = oracle_mod.state_index_of(gen.space, row)
        if idx < 0:
            escaped += 1
        else:
            observed[idx] += 1

    expected = probs * trajectories
    keep = expected >= min_expected
    obs_kept = observed[keep]
    exp_kept = expected[keep]
    other_obs = int(observed[~keep].sum()) + escaped
    other_exp = float(expected[~keep].sum())
    obs = np.append(obs_kept, other_obs).astype(float)
    exp = np.append(exp_kept, other_exp)
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = obs.size - 1
    critical = float(chi2_dist.ppf(1.0 - significance, dof))
    return OracleCertification(
        chi2=stat,
        dof=dof,
        critical=critical,
        passed=stat <= critical,
        certificate=certificate,
        escaped=escaped,
        categories=obs.size,
        trajectories=trajectories,
    )
