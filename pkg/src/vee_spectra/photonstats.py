"""Photon-counting statistics: Poisson pmf, moments and light classification."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import RangeError


def poisson_pmf(nbar: float, n: int) -> float:
    if nbar < 0 or n < 0:
        raise RangeError("nbar" if nbar < 0 else "n", "arguments must be non-negative")
    if nbar == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(nbar) - nbar - gammaln(n + 1))


def poisson_probs(nbar: float, n_max: int) -> np.ndarray:
    return np.array([poisson_pmf(nbar, n) for n in range(n_max + 1)])


def pmf_moments(probs) -> dict[str, float]:
    """Mean and variance of a count distribution over n = 0..N."""
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0):
        raise RangeError("probs", "probabilities must be non-negative")
    total = probs.sum()
    if abs(total - 1) > 1e-9:
        raise RangeError("probs", f"probabilities sum to {total}, not 1")
    n = np.arange(len(probs))
    mean = float(n @ probs)
    variance = float(((n - mean) ** 2) @ probs)
    return {"mean": mean, "variance": max(variance, 0.0)}


def classify_statistics(mean: float, variance: float, tol: float = 1e-6) -> str:
    """'sub', 'poissonian' or 'super', comparing variance to mean."""
    if mean <= 0:
        raise RangeError("mean", "mean photon number must be positive")
    if abs(variance - mean) <= tol * mean:
        return "poissonian"
    return "super" if variance > mean else "sub"


def classify_g2(g20: float, tol: float = 1e-6) -> str:
    if g20 < 0:
        raise RangeError("g20", "g2(0) cannot be negative")
    if abs(g20 - 1) <= tol:
        return "coherent"
    return "bunched" if g20 > 1 else "antibunched"
