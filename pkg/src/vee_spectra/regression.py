"""Closed quantum-regression treatment of the cavity emission.

Two linear systems do the work:

* the 3x3 generator ``T`` acting on (<a+(0) a(t)>, <a+(0) s1(t)>, <a+(0) s2(t)>),
  with the products of three operators dropped, and
* the 9x9 equation of motion for the single-time moments, whose steady state
  supplies the initial vector of the two-time problem.

Both are linear in the pump rates' effect on the moments and are exact only in
the weak-excitation limit; :mod:`vee_spectra.liouvillian` is the reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .core import SystemParams, derived_rates, validate_params
from .errors import DegenerateSpectrumError, NonDecayingError, SingularSystemError

STEADY_STATE_LABELS = (
    "a+a",
    "a+s1",
    "a s1+",
    "s1+s1",
    "s1+s2",
    "a+s2",
    "a s2+",
    "s2+s2",
    "s1 s2+",
)
MATRIX_MODES = ("corrected", "verbatim")


@dataclass(frozen=True)
class SteadyState9:
    """Single-time steady-state moments, in the fixed order of ``STEADY_STATE_LABELS``."""

    values: np.ndarray

    @property
    def n_a(self) -> complex:
        return self.values[0]

    @property
    def n_as1(self) -> complex:
        return self.values[1]

    @property
    def n_s1(self) -> complex:
        return self.values[3]

    @property
    def n_s1s2(self) -> complex:
        return self.values[4]

    @property
    def n_as2(self) -> complex:
        return self.values[5]

    @property
    def n_s2(self) -> complex:
        return self.values[7]

    @property
    def u0(self) -> np.ndarray:
        """Initial vector of the two-time problem: (<a+a>, <a+s1>, <a+s2>)."""
        return self.values[[0, 1, 5]]

    def as_dict(self) -> dict[str, complex]:
        return dict(zip(STEADY_STATE_LABELS, self.values))


@dataclass(frozen=True)
class EigenSystem:
    """``T = V @ diag(-lambdas) @ V_inv`` with ``Re(lambdas) > 0``."""

    lambdas: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray


@dataclass(frozen=True)
class SpectralWeights:
    A: np.ndarray


def build_T(p: SystemParams) -> np.ndarray:
    validate_params(p)
    r = derived_rates(p)
    g1, g2 = p.g_1, p.g_2
    return np.array(
        [
            [-r.Gamma_a / 2, -1j * g1, -1j * g2],
            [-1j * g1, -1j * p.delta_1 - r.Gamma_s1 / 2, -r.gamma_12 / 2],
            [-1j * g2, -r.gamma_12 / 2, -1j * p.delta_2 - r.Gamma_s2 / 2],
        ],
        dtype=complex,
    )


def build_single_time_system(
    p: SystemParams, mode: str = "corrected"
) -> tuple[np.ndarray, np.ndarray]:
    """Drift matrix ``M`` and source ``b`` with d/dt u = M u + b.

    ``verbatim`` keeps the uncorrected table, whose row for <a s2+> carries
    the rate (G_s1 + G_s2)/2; ``corrected`` uses (G_a + G_s2)/2, which makes
    that row the complex conjugate of the <a+ s2> row as it must be.
    """
    if mode not in MATRIX_MODES:
        raise ValueError(f"mode must be one of {MATRIX_MODES}, got {mode!r}")
    validate_params(p)
    r = derived_rates(p)
    g1, g2, c = p.g_1, p.g_2, r.gamma_12 / 2
    wa, w1, w2 = 0.0, p.delta_1, p.delta_2
    Ga, G1, G2 = r.Gamma_a, r.Gamma_s1, r.Gamma_s2
    j = 1j

    row7_rate = (Ga + G2) / 2 if mode == "corrected" else (G1 + G2) / 2
    M = np.array(
        [
            [-Ga, -j * g1, j * g1, 0, 0, -j * g2, j * g2, 0, 0],
            [-j * g1, j * (wa - w1) - (Ga + G1) / 2, 0, j * g1, 0, -c, 0, 0, j * g2],
            [j * g1, 0, j * (w1 - wa) - (Ga + G1) / 2, -j * g1, -j * g2, 0, -c, 0, 0],
            [0, j * g1, -j * g1, -G1, -c, 0, 0, 0, -c],
            [0, 0, -j * g2, -c, j * (w1 - w2) - (G1 + G2) / 2, j * g1, 0, -c, 0],
            [-j * g2, -c, 0, 0, j * g1, j * (wa - w2) - (Ga + G2) / 2, 0, j * g2, 0],
            [j * g2, 0, -c, 0, 0, 0, j * (w2 - wa) - row7_rate, -j * g2, -j * g1],
            [0, 0, 0, 0, -c, j * g2, -j * g2, -G2, -c],
            [0, j * g2, 0, -c, 0, 0, -j * g1, -c, j * (w2 - w1) - (G1 + G2) / 2],
        ],
        dtype=complex,
    )
    b = np.array([p.P_a, 0, 0, p.P_1, 0, 0, 0, p.P_2, 0], dtype=complex)
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularSystemError(f"single-time system is singular (cond={cond:.3g})")
    return M, b


def steady_state_9(p: SystemParams, mode: str = "corrected") -> SteadyState9:
    M, b = build_single_time_system(p, mode)
    lu = sla.lu_factor(M)
    u = sla.lu_solve(lu, -b)
    tol = 1e-10 * max(1.0, np.abs(b).max())
    resid = M @ u + b
    if np.abs(resid).max() > tol:
        u = u - sla.lu_solve(lu, resid)
    return SteadyState9(u)


def eigensystem_T(T: np.ndarray) -> EigenSystem:
    w, V = np.linalg.eig(T)
    scale = max(1.0, np.abs(T).max())
    diffs = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(diffs, np.inf)
    if diffs.min() <= 1e-12 * scale:
        raise DegenerateSpectrumError(f"T has (near-)repeated eigenvalues {w}")
    lambdas = -w
    if np.any(lambdas.real <= 0):
        raise NonDecayingError(f"correlations do not decay: Re(lambda) = {lambdas.real}")
    order = np.lexsort((lambdas.real, lambdas.imag))
    lambdas, V = lambdas[order], V[:, order]
    V = V / np.linalg.norm(V, axis=0)
    return EigenSystem(lambdas=lambdas, V=V, V_inv=np.linalg.inv(V))


def spectral_weights(eig: EigenSystem, u0: np.ndarray) -> SpectralWeights:
    return SpectralWeights(eig.V_inv @ np.asarray(u0, dtype=complex))


@dataclass(frozen=True)
class RegressionSolution:
    """Everything the spectra need for one parameter set."""

    params: SystemParams
    T: np.ndarray
    steady: SteadyState9
    eig: EigenSystem
    weights: SpectralWeights

    def correlator(self, tau, row: int = 0) -> np.ndarray:
        """<a+(0) c(tau)> for c = a, s1, s2 (row 0, 1, 2)."""
        tau = np.asarray(tau, dtype=float)
        coeff = self.eig.V[row] * self.weights.A
        return np.exp(-np.multiply.outer(tau, self.eig.lambdas)) @ coeff


def solve(p: SystemParams, mode: str = "corrected") -> RegressionSolution:
    T = build_T(p)
    steady = steady_state_9(p, mode)
    eig = eigensystem_T(T)
    return RegressionSolution(p, T, steady, eig, spectral_weights(eig, steady.u0))
