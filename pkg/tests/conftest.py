"""Shared oracles and generators for the test suite.

The oracles here are deliberately independent of the library's own code
paths: Fock-basis series for thermal states, brute-force enumeration for
product states, and closed-form overlap formulas.
"""

from __future__ import annotations

import numpy as np
import pytest

from covert_sense import (
    ChannelParams,
    GaussianState,
    apply_loss_thermal,
    apply_phase,
    make_coherent,
    make_thermal,
    make_tmsv,
)

ETA_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
NBAR_B_GRID = (0.1, 1.0, 10.0)
NBAR_S_GRID = (0.1, 1.0, 5.0)


def geometric_pmf(mean: float, k: np.ndarray) -> np.ndarray:
    """Bose-Einstein photon-number distribution with the given mean.

    Computed in log space so long tails do not overflow."""
    if mean == 0.0:
        return np.where(np.asarray(k) == 0, 1.0, 0.0)
    return np.exp(k * np.log(mean) - (k + 1.0) * np.log1p(mean))


def geometric_cutoff(mean: float, tail: float) -> int:
    """Smallest K with P(count >= K) <= tail."""
    if mean == 0.0:
        return 1
    ratio = mean / (1.0 + mean)
    return int(np.ceil(np.log(tail) / np.log(ratio))) + 2


def thermal_fidelity_series(n1: float, n2: float, tail: float = 1e-13) -> float:
    """Bhattacharyya sum over truncated geometric distributions."""
    k = np.arange(max(geometric_cutoff(n1, tail), geometric_cutoff(n2, tail)))
    return float(np.sum(np.sqrt(geometric_pmf(n1, k) * geometric_pmf(n2, k))))


def kl_geometric_series(mu0: float, mu1: float, tail: float = 1e-16) -> float:
    """Classical KL divergence between geometric distributions, truncated."""
    k = np.arange(geometric_cutoff(mu0, tail))
    p0 = geometric_pmf(mu0, k)
    log_ratio = k * np.log(mu0 / mu1) + (k + 1.0) * (np.log1p(mu1) - np.log1p(mu0))
    return float(np.sum(p0 * log_ratio))


def brute_force_product_tv(
    n: int, mu0: float, mu1: float, cutoff: int = 120
) -> float:
    """Total variation between n-mode product geometric laws by enumeration.

    Enumerates every per-mode count tuple below the cutoff; the neglected
    mass is astronomically small for the means used in tests.
    """
    k = np.arange(cutoff)
    p0 = geometric_pmf(mu0, k)
    p1 = geometric_pmf(mu1, k)
    joint0 = p0.copy()
    joint1 = p1.copy()
    for _ in range(n - 1):
        joint0 = np.multiply.outer(joint0, p0).ravel()
        joint1 = np.multiply.outer(joint1, p1).ravel()
    return float(np.abs(joint0 - joint1).sum())


def random_physical_state(rng: np.random.Generator) -> GaussianState:
    """A random physical state built from validated constructors and maps."""
    kind = rng.integers(0, 3)
    if kind == 0:
        state = make_coherent(rng.normal(scale=1.5), rng.normal(scale=1.5))
    elif kind == 1:
        state = make_thermal(float(rng.uniform(0.0, 5.0)))
    else:
        state = make_tmsv(float(rng.uniform(0.0, 3.0)))
    for _ in range(int(rng.integers(0, 3))):
        mode = int(rng.integers(0, state.modes))
        if rng.random() < 0.5:
            state = apply_phase(state, float(rng.uniform(-np.pi, np.pi)), mode)
        else:
            ch = ChannelParams(float(rng.uniform(0.05, 0.95)),
                               float(rng.uniform(0.05, 5.0)))
            state = apply_loss_thermal(state, ch, mode)
    return state


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)
