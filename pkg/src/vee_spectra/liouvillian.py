"""Brute-force Lindblad oracle on a truncated Hilbert space.

Density matrices are vectorized by column stacking, so
``vec(A @ X @ B) = kron(B.T, A) @ vec(X)``. The generator is stored as a
sparse matrix; steady states come from a bordered sparse LU solve and time
evolution from the action of the matrix exponential.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import SystemParams, derived_rates, validate_params
from .errors import (
    ConvergenceWarning,
    DegenerateSteadyStateError,
    DimensionError,
    GridWarning,
    NonPositiveDissipatorError,
    RangeError,
    StepFailureError,
)
from .spectra import SpectrumResult

DIM_CAP = 4096
DEFAULT_CUTOFF = 12


@dataclass
class LindbladModel:
    dim: int
    H: np.ndarray
    jumps: list[tuple[float, np.ndarray]]
    labels: dict[str, np.ndarray] = field(default_factory=dict)
    fock_cutoff: int | None = None

    def __post_init__(self):
        H = np.asarray(self.H, dtype=complex)
        if H.shape != (self.dim, self.dim):
            raise DimensionError(f"H has shape {H.shape}, expected {(self.dim,) * 2}")
        scale = max(np.abs(H).max(), 1.0)
        if np.abs(H - H.conj().T).max() > 1e-12 * scale:
            raise ValueError("Hamiltonian is not Hermitian")
        if any(rate < 0 for rate, _ in self.jumps):
            raise ValueError("jump rates must be non-negative")
        self.H = H


@dataclass(frozen=True)
class SensorSpec:
    omega: float
    Gamma: float
    epsilon: float

    def __post_init__(self):
        if self.Gamma <= 0 or self.epsilon <= 0:
            raise RangeError("sensor", "sensor Gamma and epsilon must be positive")
        if self.epsilon > 0.1 * self.Gamma:
            warnings.warn(
                f"sensor coupling {self.epsilon} is not small against its linewidth "
                f"{self.Gamma}",
                ConvergenceWarning,
                stacklevel=3,
            )

    def with_epsilon(self, epsilon: float) -> "SensorSpec":
        return SensorSpec(self.omega, self.Gamma, epsilon)


@dataclass
class CorrelatorSeries:
    tau: np.ndarray
    values: np.ndarray
    labelA: str
    labelB: str


@dataclass(frozen=True)
class SensorG2:
    g2: float
    g2_half: float
    delta: float
    n1: float
    n2: float
    n12: float


def destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def lowering() -> np.ndarray:
    """Two-level lowering operator |0><1| in the basis (|0>, |1>)."""
    return np.array([[0, 1], [0, 0]], dtype=complex)


def _embed(op: np.ndarray, index: int, dims: list[int]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for k, d in enumerate(dims):
        out = np.kron(out, op if k == index else np.eye(d))
    return out


def model_pumped_cavity(gamma_a: float, P_a: float, cutoff: int = DEFAULT_CUTOFF) -> LindbladModel:
    """Bare cavity with loss and incoherent pumping: a thermal steady state."""
    if cutoff < 2:
        raise RangeError("cutoff", "Fock cutoff must be >= 2")
    a = destroy(cutoff)
    jumps = [(gamma_a, a), (P_a, a.conj().T)]
    return LindbladModel(cutoff, np.zeros((cutoff, cutoff)), jumps, {"a": a}, cutoff)


def decay_channels(gamma_1: float, gamma_2: float, gamma_12: float):
    """Eigen-decompose the 2x2 exciton decay-rate matrix into independent jumps.

    Returns ``(rates, U)`` with jump m equal to ``U[0, m] s1 + U[1, m] s2``.
    """
    rate_matrix = np.array([[gamma_1, gamma_12], [gamma_12, gamma_2]], dtype=float)
    rates, U = np.linalg.eigh(rate_matrix)
    if rates.min() < -1e-12:
        raise NonPositiveDissipatorError(f"decay-rate matrix has eigenvalues {rates}")
    return np.clip(rates, 0.0, None), U


def model_three_level_cavity(
    p: SystemParams, cutoff: int = DEFAULT_CUTOFF, allow_unstable: bool = False
) -> LindbladModel:
    if cutoff < 2:
        raise RangeError("cutoff", "Fock cutoff must be >= 2")
    validate_params(p, allow_unstable=allow_unstable)
    r = derived_rates(p)
    dims = [cutoff, 2, 2]
    a = _embed(destroy(cutoff), 0, dims)
    s1 = _embed(lowering(), 1, dims)
    s2 = _embed(lowering(), 2, dims)
    ad, s1d, s2d = a.conj().T, s1.conj().T, s2.conj().T
    H = (
        p.delta_1 * s1d @ s1
        + p.delta_2 * s2d @ s2
        + p.g_1 * (ad @ s1 + a @ s1d)
        + p.g_2 * (ad @ s2 + a @ s2d)
    )
    rates, U = decay_channels(p.gamma_1, p.gamma_2, r.gamma_12)
    jumps = [(p.gamma_a, a), (p.P_a, ad), (p.P_1, s1d), (p.P_2, s2d)]
    jumps += [(rates[m], U[0, m] * s1 + U[1, m] * s2) for m in range(2)]
    labels = {"a": a, "sigma1": s1, "sigma2": s2}
    return LindbladModel(4 * cutoff, H, jumps, labels, cutoff)


def model_driven_qubit(omega_L_rabi: float, gamma: float, detuning: float = 0.0) -> LindbladModel:
    """Coherently driven two-level emitter, H = detuning s+s + Omega_L (s + s+)."""
    if gamma <= 0:
        raise RangeError("gamma", "decay rate must be positive")
    s = lowering()
    H = detuning * s.conj().T @ s + omega_L_rabi * (s + s.conj().T)
    return LindbladModel(2, H, [(gamma, s)], {"sigma": s})


def attach_sensors(
    m: LindbladModel, sensors, target: str = "a", dim_cap: int = DIM_CAP
) -> LindbladModel:
    """Append one two-level sensor per spec, each coupled to ``labels[target]``."""
    sensors = list(sensors)
    if not sensors:
        return m
    dim = m.dim * 2 ** len(sensors)
    if dim > dim_cap:
        raise DimensionError(f"model with sensors has dimension {dim} > cap {dim_cap}")
    dims = [m.dim] + [2] * len(sensors)
    lift = lambda op: _embed(op, 0, dims)  # noqa: E731
    O = lift(m.labels[target])
    H = lift(m.H)
    jumps = [(rate, lift(L)) for rate, L in m.jumps]
    labels = {name: lift(op) for name, op in m.labels.items()}
    n_old = sum(1 for k in m.labels if k.startswith("sensor"))
    for k, spec in enumerate(sensors, start=1):
        sk = _embed(lowering(), k, dims)
        skd = sk.conj().T
        H = H + spec.omega * skd @ sk + spec.epsilon * (O.conj().T @ sk + O @ skd)
        jumps.append((spec.Gamma, sk))
        labels[f"sensor{n_old + k}"] = sk
    return LindbladModel(dim, H, jumps, labels, m.fock_cutoff)


def liouvillian(m: LindbladModel) -> sp.csc_matrix:
    d = m.dim
    eye = sp.identity(d, dtype=complex, format="csr")
    H = sp.csr_matrix(m.H)
    L = -1j * (sp.kron(eye, H) - sp.kron(H.T, eye))
    for rate, J in m.jumps:
        if rate == 0:
            continue
        J = sp.csr_matrix(J)
        JdJ = (J.conj().T @ J).tocsr()
        L = L + rate * (
            sp.kron(J.conj(), J) - 0.5 * sp.kron(eye, JdJ) - 0.5 * sp.kron(JdJ.T, eye)
        )
    return L.tocsc()


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def _bordered_solve(L: sp.csc_matrix, d: int, border: np.ndarray) -> np.ndarray:
    trace_row = vec(np.eye(d))
    n = L.shape[0]
    B = sp.bmat(
        [[L, sp.csc_matrix(border.reshape(-1, 1))], [sp.csr_matrix(trace_row.reshape(1, -1)), None]],
        format="csc",
    )
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[-1] = 1.0
    try:
        x = spla.splu(B).solve(rhs)
    except RuntimeError as exc:
        raise DegenerateSteadyStateError(f"steady state is not unique: {exc}") from exc
    return x[:n]


def steady_state_density(m: LindbladModel, L: sp.csc_matrix | None = None) -> np.ndarray:
    """Unique trace-one null vector of the generator.

    The trace constraint is appended as a bordered row; uniqueness is checked by
    re-solving with a second border column and comparing.
    """
    d = m.dim
    L = liouvillian(m) if L is None else L
    x1 = _bordered_solve(L, d, vec(np.eye(d)) / d)
    x2 = _bordered_solve(L, d, vec(np.diag(np.linspace(1.0, 2.0, d))) / d)
    if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
        raise DegenerateSteadyStateError("steady-state solve produced non-finite values")
    if np.abs(x1 - x2).max() > 1e-8 * max(1.0, np.abs(x1).max()):
        raise DegenerateSteadyStateError("steady state depends on the border: null space > 1")
    rho = unvec(x1, d)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def expect(op: np.ndarray, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


def evolve(m: LindbladModel, rho0: np.ndarray, t: float, L: sp.csc_matrix | None = None) -> np.ndarray:
    if t == 0:
        return np.array(rho0, dtype=complex, copy=True)
    L = liouvillian(m) if L is None else L
    v = spla.expm_multiply(L * t, vec(rho0).astype(complex))
    if not np.all(np.isfinite(v)):
        raise StepFailureError(f"propagation to t={t} produced non-finite values")
    return unvec(v, m.dim)


def default_tau_max(m: LindbladModel, min_decay: float | None = None) -> float:
    """40 decay times of the slowest regression mode, else of the largest jump rate."""
    if min_decay is None:
        min_decay = max(rate for rate, _ in m.jumps)
    return 40.0 / min_decay


def two_time_correlator(
    m: LindbladModel,
    A: str,
    B: str,
    tau,
    rho_ss: np.ndarray | None = None,
    connected: bool = False,
) -> CorrelatorSeries:
    """<A(0) B(tau)> in the steady state, by propagating rho_ss @ A.

    ``tau`` must be a uniform grid starting at 0. ``connected`` subtracts
    <A><B>, removing the undamped coherent part.
    """
    tau = np.asarray(tau, dtype=float)
    if tau[0] != 0 or (len(tau) > 2 and np.ptp(np.diff(tau)) > 1e-9 * tau[-1]):
        raise ValueError("tau grid must be uniform and start at 0")
    L = liouvillian(m)
    rho_ss = steady_state_density(m, L) if rho_ss is None else rho_ss
    opA, opB = m.labels[A], m.labels[B]
    X0 = vec(rho_ss @ opA)
    if len(tau) == 1:
        states = X0[None, :]
    else:
        states = spla.expm_multiply(L, X0, start=0.0, stop=tau[-1], num=len(tau), endpoint=True)
    if not np.all(np.isfinite(states)):
        raise StepFailureError("correlator propagation produced non-finite values")
    # Tr[B X] = sum_ij B_ji X_ij = vec(B.T) . vec(X)
    values = states @ vec(opB.T)
    if connected:
        values = values - expect(opA, rho_ss) * expect(opB, rho_ss)
    return CorrelatorSeries(tau, values, A, B)


def spectrum_from_correlator(c: CorrelatorSeries, omega) -> SpectrumResult:
    """(1 / (pi Re c(0))) Re int_0^inf c(tau) exp(i omega tau) dtau, trapezoid rule."""
    if abs(c.values[-1]) > 1e-4 * abs(c.values[0]):
        warnings.warn("correlator has not decayed at tau_max", GridWarning, stacklevel=2)
    omega = np.asarray(omega, dtype=float)
    w = np.full(len(c.tau), c.tau[1] - c.tau[0])
    w[0] = w[-1] = 0.5 * w[0]
    integral = np.exp(1j * np.multiply.outer(omega, c.tau)) @ (w * c.values)
    values = np.real(integral) / (np.pi * c.values[0].real)
    if (c.labelA, c.labelB) == ("a+", "a") or c.labelB == "a":
        channel = "cavity"
    else:
        channel = f"{c.labelA},{c.labelB}"
    return SpectrumResult(channel, omega, values, "oracle", {"tau_max": float(c.tau[-1])})


def oracle_spectrum(
    m: LindbladModel,
    omega,
    tau_max: float,
    tau_points: int = 2048,
    A: str = "a",
    connected: bool = False,
) -> SpectrumResult:
    """Emission spectrum of the mode ``labels[A]`` via <A+(0) A(tau)>."""
    op = m.labels[A]
    labels = dict(m.labels)
    labels[A + "+"] = op.conj().T
    mm = LindbladModel(m.dim, m.H, m.jumps, labels, m.fock_cutoff)
    tau = np.linspace(0.0, tau_max, tau_points)
    c = two_time_correlator(mm, A + "+", A, tau, connected=connected)
    s = spectrum_from_correlator(c, omega)
    s.channel = "cavity" if A == "a" else A
    return s


def sensor_populations(m: LindbladModel, s1: SensorSpec, s2: SensorSpec, target: str = "a"):
    ms = attach_sensors(m, [s1, s2], target)
    rho = steady_state_density(ms)
    k = sum(1 for name in ms.labels if name.startswith("sensor"))
    n1_op = ms.labels[f"sensor{k - 1}"].conj().T @ ms.labels[f"sensor{k - 1}"]
    n2_op = ms.labels[f"sensor{k}"].conj().T @ ms.labels[f"sensor{k}"]
    n1 = expect(n1_op, rho).real
    n2 = expect(n2_op, rho).real
    n12 = expect(n1_op @ n2_op, rho).real
    return n1, n2, n12


def sensor_g2(m: LindbladModel, s1: SensorSpec, s2: SensorSpec, target: str = "a") -> SensorG2:
    """Frequency-filtered g2 from two weakly coupled sensors, with an eps-halving check."""
    n1, n2, n12 = sensor_populations(m, s1, s2, target)
    g2 = n12 / (n1 * n2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        h1, h2 = s1.with_epsilon(s1.epsilon / 2), s2.with_epsilon(s2.epsilon / 2)
    m1, m2, m12 = sensor_populations(m, h1, h2, target)
    g2_half = m12 / (m1 * m2)
    delta = abs(g2 - g2_half)
    if delta > 0.01 * abs(g2_half):
        warnings.warn(
            f"sensor g2 not converged in epsilon: {g2:.6g} vs {g2_half:.6g}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return SensorG2(g2, g2_half, delta, n1, n2, n12)


def observables_9(m: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """The nine single-time moments in the regression module's ordering."""
    a, s1, s2 = m.labels["a"], m.labels["sigma1"], m.labels["sigma2"]
    ad, s1d, s2d = a.conj().T, s1.conj().T, s2.conj().T
    ops = [ad @ a, ad @ s1, a @ s1d, s1d @ s1, s1d @ s2, ad @ s2, a @ s2d, s2d @ s2, s1 @ s2d]
    return np.array([expect(op, rho) for op in ops])
