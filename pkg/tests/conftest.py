"""Shared fixtures: baseline network setup and random update material."""

import numpy as np
import pytest

from augring import ExperimentConfig


BASELINE = dict(seed=2024, trials=100, horizon=2000, n_nodes=10, filter_length=4,
                projection_order=2, regularization=1e-3)


@pytest.fixture(scope="session")
def baseline_config():
    """Full-scale setup: N=10, L=4, T=2, mu=0.2, 100 trials, 2000 cycles."""
    return ExperimentConfig(**BASELINE)


@pytest.fixture()
def small_config():
    """Desk-scale setup for fast plumbing tests."""
    return ExperimentConfig(seed=7, trials=3, horizon=120, n_nodes=3, filter_length=2,
                            projection_order=2, moment_samples=200,
                            signals=("circular_ar1",), output_dir="out")


def random_regressor(rng, filter_length, projection_order, improper=0.5):
    """Complex Gaussian regressor matrix with a controllable improper part."""
    shape = (filter_length, projection_order)
    x = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return x + improper * np.conj(x)


def random_pd(rng, dim, floor=0.1):
    """Random Hermitian positive definite matrix."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a @ np.conj(a.T) + floor * np.eye(dim)
