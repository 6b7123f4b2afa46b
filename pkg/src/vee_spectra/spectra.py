"""Emission spectra from the regression solution, plus peak analysis."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import regression
from .core import SystemParams
from .errors import GridWarning, TripletNotFoundError, ZeroPopulationError

CHANNELS = ("cavity", "exciton1", "exciton2")
_CHANNEL_ALIASES = {"a": "cavity", "sigma1": "exciton1", "sigma2": "exciton2"}
SPECTRUM_MODES = ("exact", "paper")


def default_grid(lo: float = -5.0, hi: float = 5.0, points: int = 4001) -> np.ndarray:
    return np.linspace(lo, hi, points)


@dataclass
class SpectrumResult:
    channel: str
    omega: np.ndarray
    values: np.ndarray
    mode: str
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PeakInfo:
    position: float
    height: float
    fwhm: float | None
    kind: str  # "maximum" or "minimum"


def channel_name(channel: str) -> str:
    channel = _CHANNEL_ALIASES.get(channel, channel)
    if channel not in CHANNELS:
        raise ValueError(f"unknown channel {channel!r}")
    return channel


def lorentzian_sum(omega, lambdas, coeffs, mode: str = "exact") -> np.ndarray:
    """Re-part of sum_i c_i / (lambda_i - i omega), or the real-weight Lorentzian form.

    Evaluated pointwise in omega; no reductions across the grid.
    """
    omega = np.asarray(omega, dtype=float)[:, None]
    lam = np.asarray(lambdas)[None, :]
    c = np.asarray(coeffs)[None, :]
    if mode == "exact":
        return np.real(c / (lam - 1j * omega)).sum(axis=1)
    if mode == "paper":
        lor = lam.real / ((omega - lam.imag) ** 2 + lam.real**2)
        return np.real(c * lor).sum(axis=1)
    raise ValueError(f"mode must be one of {SPECTRUM_MODES}, got {mode!r}")


def spectrum_from_solution(
    sol: regression.RegressionSolution, channel: str, omega=None, mode: str = "exact"
) -> SpectrumResult:
    channel = channel_name(channel)
    row = CHANNELS.index(channel)
    norm = {0: sol.steady.n_a, 1: sol.steady.n_s1, 2: sol.steady.n_s2}[row].real
    if abs(norm) < 1e-14:
        raise ZeroPopulationError(f"{channel} population is zero; spectrum undefined")
    omega = default_grid() if omega is None else np.asarray(omega, dtype=float)
    coeff = sol.eig.V[row] * sol.weights.A
    values = lorentzian_sum(omega, sol.eig.lambdas, coeff, mode) / (np.pi * norm)
    meta = {
        "lambdas": sol.eig.lambdas,
        "weights": sol.weights.A,
        "normalizer": norm,
    }
    return SpectrumResult(channel, omega, values, mode, meta)


def emission_spectrum(
    p: SystemParams,
    channel: str = "cavity",
    omega=None,
    mode: str = "exact",
    matrix_mode: str = "corrected",
) -> SpectrumResult:
    return spectrum_from_solution(regression.solve(p, matrix_mode), channel, omega, mode)


def integrate_spectrum(s: SpectrumResult) -> float:
    v = np.asarray(s.values)
    edge = max(abs(v[0]), abs(v[-1]))
    if edge > 1e-4 * np.abs(v).max():
        s.meta["edge_warning"] = True
        warnings.warn("spectrum not negligible at grid edges", GridWarning, stacklevel=2)
    return float(np.trapezoid(v, s.omega))


def _refine(x, y, i) -> tuple[float, float]:
    """Vertex of the parabola through samples i-1, i, i+1."""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(x[i]), float(y1)
    h = x[i + 1] - x[i]
    shift = 0.5 * (y0 - y2) / denom
    return float(x[i] + shift * h), float(y1 - 0.25 * (y0 - y2) * shift)


def _half_crossing(x, y, i, half, step) -> float | None:
    """Walk from peak i until y drops below half; None if y turns back up first."""
    j = i
    while 0 <= j + step < len(y):
        k = j + step
        if y[k] <= half:
            return float(x[j] + (half - y[j]) * (x[k] - x[j]) / (y[k] - y[j]))
        if y[k] > y[j]:
            return None
        j = k
    return None


def _prominence(y, i, sign) -> float:
    z = sign * y
    left = z[: i + 1]
    higher = np.nonzero(left > z[i])[0]
    lmin = z[(higher[-1] if higher.size else 0) : i + 1].min()
    right = z[i:]
    higher = np.nonzero(right > z[i])[0]
    rmin = z[i : i + (higher[0] if higher.size else len(right))].min()
    return float(z[i] - max(lmin, rmin))


def find_peaks(s: SpectrumResult, prominence: float | None = None) -> list[PeakInfo]:
    """Local maxima and minima, ordered by position.

    FWHM is measured for maxima from the zero baseline and is ``None`` whenever
    either half-height crossing is blocked by a neighbouring peak or the grid edge.
    """
    x = np.asarray(s.omega, dtype=float)
    y = np.asarray(s.values, dtype=float)
    if len(y) < 3:
        return []
    if prominence is None:
        prominence = 1e-3 * (y.max() - y.min())
    peaks = []
    for sign, kind in ((1, "maximum"), (-1, "minimum")):
        z = sign * y
        cand = np.nonzero((z[1:-1] > z[:-2]) & (z[1:-1] >= z[2:]))[0] + 1
        for i in cand:
            if _prominence(y, i, sign) < prominence:
                continue
            pos, h = _refine(x, y, i)
            fwhm = None
            if kind == "maximum" and y[i] > 0:
                lo = _half_crossing(x, y, i, y[i] / 2, -1)
                hi = _half_crossing(x, y, i, y[i] / 2, +1)
                if lo is not None and hi is not None:
                    fwhm = hi - lo
            peaks.append(PeakInfo(pos, h, fwhm, kind))
    peaks.sort(key=lambda pk: pk.position)
    return peaks


def maxima(s: SpectrumResult, prominence: float | None = None) -> list[PeakInfo]:
    return [pk for pk in find_peaks(s, prominence) if pk.kind == "maximum"]


def central_peak(peaks: list[PeakInfo]) -> PeakInfo:
    """Maximum closest to the cavity frequency."""
    return min(peaks, key=lambda pk: abs(pk.position))


def mollow_ratios(s: SpectrumResult, prominence: float | None = None) -> dict[str, float]:
    peaks = maxima(s, prominence)
    if len(peaks) != 3:
        raise TripletNotFoundError(f"expected 3 maxima, found {len(peaks)}")
    left, mid, right = peaks
    if None in (left.fwhm, mid.fwhm, right.fwhm):
        raise TripletNotFoundError("triplet peaks overlap; widths not measurable")
    return {
        "height_ratio": mid.height / (0.5 * (left.height + right.height)),
        "width_ratio": 0.5 * (left.fwhm + right.fwhm) / mid.fwhm,
    }
