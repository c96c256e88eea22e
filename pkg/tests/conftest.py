"""Shared fixtures: the heavyweight ensembles are built once per session."""

import os

import pytest

from asepsim.core import ModelParameters, truncation_size
from asepsim.harness import EnsembleConfig, run_ensemble, _final_positions

WORKERS = min(2, os.cpu_count() or 1)

ASEP = ModelParameters(0.25, 0.75)
TASEP = ModelParameters(0.0, 1.0)


@pytest.fixture(scope="session")
def gamma_half_summaries():
    """Limit-law ensembles at gamma = 0.5, v = 0, M = 2000, seed 1."""
    out = {}
    for t in (50.0, 100.0, 200.0, 400.0):
        cfg = EnsembleConfig(params=ASEP, v=0.0, t=t, trajectories=2000,
                             seed=1, workers=WORKERS)
        out[t] = run_ensemble(cfg)
    return out


@pytest.fixture(scope="session")
def tasep200_summary():
    cfg = EnsembleConfig(params=TASEP, v=0.0, t=200.0, trajectories=2000,
                         seed=1, workers=WORKERS)
    return run_ensemble(cfg)


@pytest.fixture(scope="session")
def tasep200_positions():
    n = truncation_size(200.0, 0)
    return _final_positions(TASEP, n, 200.0, 2000, 1, workers=WORKERS)


@pytest.fixture(scope="session")
def tasep50_positions_10k():
    n = truncation_size(50.0, 0)
    return _final_positions(TASEP, n, 50.0, 10000, 7, workers=WORKERS)
