"""Dressed-state laser: mixing angle, steady inversion, threshold, semiclassical ODEs.

The dressed-frame rates ``gamma1_d``, ``gamma2_d`` and the effective coupling
``lambda_1`` are plain inputs. No relation to the bare rates is assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DivisionError, RangeError, StepFailureError, UndefinedAngleError

INVERSION_MODES = ("verbatim", "literature")


@dataclass(frozen=True)
class DressedParams:
    N: int = 1
    Omega: float = 0.0
    delta_1: float = 0.0
    delta_2: float = 0.0
    g: float = 0.0
    gamma: float = 1.0
    Gamma_cav: float = 1.0
    gamma1_d: float = 1.0
    gamma2_d: float = 1.0
    lambda_1: float = 0.0

    def __post_init__(self):
        if self.N < 1:
            raise RangeError("N", "atom number must be >= 1")
        if self.Omega < 0:
            raise RangeError("Omega", "Rabi frequency must be >= 0")
        for name in ("gamma", "Gamma_cav", "gamma1_d", "gamma2_d"):
            if getattr(self, name) < 0:
                raise RangeError(name, f"{name} must be >= 0")


@dataclass(frozen=True)
class SemiclassicalState:
    S: complex
    S3: float
    a: complex


@dataclass
class Trajectory:
    t: np.ndarray
    S: np.ndarray
    S3: np.ndarray
    a: np.ndarray

    def state(self, k: int) -> SemiclassicalState:
        return SemiclassicalState(complex(self.S[k]), float(self.S3[k]), complex(self.a[k]))


def mixing_angle(Omega: float, delta_1: float) -> float:
    """alpha in [0, pi/2] with Omega = W sin(2 alpha), delta_1 = W cos(2 alpha)."""
    if Omega == 0 and delta_1 == 0:
        raise UndefinedAngleError("mixing angle undefined for Omega = delta_1 = 0")
    if Omega < 0:
        raise RangeError("Omega", "Rabi frequency must be >= 0")
    return math.atan2(abs(Omega), delta_1) / 2


def generalized_rabi(Omega: float, delta_1: float) -> float:
    return math.hypot(Omega, delta_1)


def inversion_bar(N: int, alpha: float, mode: str = "verbatim") -> float:
    """Steady dressed-state inversion.

    ``verbatim`` divides by 1 + cos^2(alpha); ``literature`` by
    1 + cos^2(2 alpha), which keeps |S3| <= N.
    """
    c2 = math.cos(2 * alpha)
    if mode == "verbatim":
        denom = 1 + math.cos(alpha) ** 2
    elif mode == "literature":
        denom = 1 + c2**2
    else:
        raise ValueError(f"mode must be one of {INVERSION_MODES}, got {mode!r}")
    return -2 * N * c2 / denom


def pulled_frequency(gamma1_d: float, Gamma_cav: float, delta_2: float, omega_prime: float) -> float:
    total = gamma1_d + Gamma_cav
    if total == 0:
        raise DivisionError("gamma1_d + Gamma_cav must be positive")
    return (gamma1_d * delta_2 + Gamma_cav * omega_prime) / total


def threshold_rhs(p: DressedParams) -> float:
    """Right-hand side of the dressed-laser operating condition ``1 >= RHS``."""
    alpha = mixing_angle(p.Omega, p.delta_1)
    w = generalized_rabi(p.Omega, p.delta_1)
    c2 = math.cos(2 * alpha)
    s2 = math.sin(2 * alpha)
    gain = -p.N * p.g**2 * c2 * (1 + c2) ** 2
    loss = 4 * p.gamma * p.Gamma_cav * (2 + s2**2) * (1 + c2**2)
    if loss == 0:
        raise DivisionError("gamma * Gamma_cav must be positive")
    detuning = 1 + (p.delta_2 - w) ** 2 / (p.gamma1_d + p.Gamma_cav) ** 2
    return gain / loss / detuning


def lasing_margin(p: DressedParams) -> float:
    """RHS - 1: positive means ``1 >= RHS`` is violated (above threshold)."""
    return threshold_rhs(p) - 1.0


def _rhs(p: DressedParams, s3_bar: float):
    w = generalized_rabi(p.Omega, p.delta_1)
    lam, g1, g2 = p.lambda_1, p.gamma1_d, p.gamma2_d

    def f(t, y):
        S = y[0] + 1j * y[1]
        S3 = y[2]
        a = y[3] + 1j * y[4]
        dS = -(g1 + 1j * w) * S + 1j * lam * S3 * a
        dS3 = -g2 * (S3 - s3_bar) + (2j * g1 * (np.conj(a) * S - np.conj(S) * a)).real
        da = -(p.Gamma_cav + 1j * p.delta_2) * a - 1j * lam * S
        return [dS.real, dS.imag, dS3, da.real, da.imag]

    return f


def integrate_semiclassical(
    p: DressedParams,
    s0: SemiclassicalState,
    t_max: float,
    dt: float,
    inversion_mode: str = "verbatim",
) -> Trajectory:
    """Integrate the polarization / inversion / field equations with adaptive RK45.

    Output is sampled every ``dt``; the step size itself is adaptive.
    """
    if dt <= 0 or t_max <= 0:
        raise RangeError("dt", "dt and t_max must be positive")
    alpha = mixing_angle(p.Omega, p.delta_1)
    s3_bar = inversion_bar(p.N, alpha, inversion_mode)
    t_eval = np.arange(0.0, t_max + 0.5 * dt, dt)
    t_eval = t_eval[t_eval <= t_max]
    y0 = [s0.S.real, s0.S.imag, s0.S3, s0.a.real, s0.a.imag]
    sol = solve_ivp(
        _rhs(p, s3_bar), (0.0, t_max), y0, method="RK45", t_eval=t_eval, rtol=1e-9, atol=1e-9
    )
    if not sol.success:
        raise StepFailureError(sol.message)
    y = sol.y
    return Trajectory(sol.t, y[0] + 1j * y[1], y[2], y[3] + 1j * y[4])


def trivial_fixed_point_jacobian(p: DressedParams, inversion_mode: str = "verbatim") -> np.ndarray:
    """Linearization of (S, a) about S = a = 0, S3 = S3_bar."""
    alpha = mixing_angle(p.Omega, p.delta_1)
    s3_bar = inversion_bar(p.N, alpha, inversion_mode)
    w = generalized_rabi(p.Omega, p.delta_1)
    return np.array(
        [
            [-(p.gamma1_d + 1j * w), 1j * p.lambda_1 * s3_bar],
            [-1j * p.lambda_1, -(p.Gamma_cav + 1j * p.delta_2)],
        ]
    )
