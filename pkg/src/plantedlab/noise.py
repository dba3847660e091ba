"""Noise operators, one per model, with replayable seeds.

Discrete models use Bernoulli resampling: each coordinate is independently
replaced by a fresh draw from its ambient distribution with probability rho.
Gaussian models use the Ornstein-Uhlenbeck average sqrt(1-rho^2) * y + rho * Z.

rho = 0 is a bit-exact identity.  Each operator takes an explicit seed so the
same noise realization can be replayed against different estimators.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .models import PspInstance, adjacency_from_edge_vector, edge_vector_from_adjacency
from .rng import generator


def _check_rho(rho: float) -> None:
    if not (0.0 <= rho <= 1.0):
        raise ParameterError(f"need rho in [0,1], got {rho}")


def noise_psp(instance: PspInstance, rho: float, seed: int) -> np.ndarray:
    """Resample every unordered pair from Bern(q) with probability rho."""
    _check_rho(rho)
    adj = instance.adjacency
    if rho == 0.0:
        return adj.copy()
    q = instance.params.q
    vec = edge_vector_from_adjacency(adj)
    rng = generator(seed)
    mask = rng.random(vec.shape) < rho
    fresh = rng.random(vec.shape) < q
    out = np.where(mask, fresh, vec)
    return adjacency_from_edge_vector(out, instance.params.n)


def noise_rlc(y: np.ndarray, rho: float, seed: int) -> np.ndarray:
    """Resample each codeword bit from Bern(1/2) with probability rho; A untouched."""
    _check_rho(rho)
    if rho == 0.0:
        return y.copy()
    rng = generator(seed)
    mask = rng.random(y.shape) < rho
    fresh = rng.integers(0, 2, size=y.shape, dtype=y.dtype)
    return np.where(mask, fresh, y)


def noise_gss(Y: float, rho: float, seed: int) -> float:
    """Ornstein-Uhlenbeck step on the scalar observation."""
    _check_rho(rho)
    if rho == 0.0:
        return float(Y)
    rng = generator(seed)
    z = rng.standard_normal()
    return float(np.sqrt(1.0 - rho * rho) * Y + rho * z)


def noise_tpca(Y: np.ndarray, rho: float, seed: int) -> np.ndarray:
    """Entrywise Ornstein-Uhlenbeck step on the observed tensor."""
    _check_rho(rho)
    if rho == 0.0:
        return Y.copy()
    rng = generator(seed)
    Z = rng.standard_normal(Y.shape)
    return np.sqrt(1.0 - rho * rho) * Y + rho * Z


def noise_observation(model: str, observation, rho: float, seed: int, *, instance=None):
    """Apply the model's operator to a generic observation tuple.

    PSP needs the instance (for q); RLC observations are (A, y) with noise on
    y only; GSS observations are (X, Y) with noise on Y only.
    """
    if model == "psp":
        if instance is None:
            raise ParameterError("psp noise needs the instance to read q")
        return noise_psp(instance, rho, seed)
    if model == "rlc":
        A, y = observation
        return (A, noise_rlc(y, rho, seed))
    if model == "gss":
        X, Y = observation
        return (X, noise_gss(Y, rho, seed))
    if model == "tpca":
        return noise_tpca(observation, rho, seed)
    raise ParameterError(f"unknown model {model!r}")


def noise_instance_observation(instance, rho: float, seed: int):
    from .models import model_name

    model = model_name(instance.params)
    if model == "psp":
        return noise_psp(instance, rho, seed)
    return noise_observation(model, instance.observation, rho, seed)


def ou_compose(rho1: float, rho2: float) -> float:
    """The single rho equivalent to applying OU noise at rho1 then rho2."""
    _check_rho(rho1)
    _check_rho(rho2)
    return float(np.sqrt(rho1**2 + rho2**2 - rho1**2 * rho2**2))
