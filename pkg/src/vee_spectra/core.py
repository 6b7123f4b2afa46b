"""Parameter containers and derived rates for the Vee emitter + cavity model.

Every rate and frequency is expressed in units of the exciton-1 coupling g_1,
which is fixed to one. Frequencies live in the frame rotating at the cavity
frequency, so the cavity sits at zero and ``delta_i`` is the detuning of
exciton ``i`` from the cavity.
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .errors import RangeError, StabilityError

PARAM_KEYS = (
    "gamma_a",
    "gamma_1",
    "gamma_2",
    "g_2",
    "beta",
    "P_a",
    "P_1",
    "P_2",
    "delta_1",
    "delta_2",
)

_NONNEGATIVE = ("gamma_a", "gamma_1", "gamma_2", "g_2", "P_a", "P_1", "P_2")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class SystemParams:
    delta_1: float = 0.0
    delta_2: float = 0.0
    g_2: float = 1.0
    gamma_a: float = 0.0
    gamma_1: float = 0.0
    gamma_2: float = 0.0
    beta: float = 0.0
    P_a: float = 0.0
    P_1: float = 0.0
    P_2: float = 0.0
    g_1: float = 1.0

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedRates:
    gamma_12: float
    Gamma_a: float
    Gamma_s1: float
    Gamma_s2: float


def validate_params(p: SystemParams, allow_unstable: bool = False) -> SystemParams:
    """Return ``p`` unchanged or raise naming the first offending field.

    ``allow_unstable`` skips the ``P_a < gamma_a`` check; the brute-force
    Lindblad oracle can still produce a (cutoff-dependent) answer there.
    """
    for name in PARAM_KEYS + ("g_1",):
        if not math.isfinite(getattr(p, name)):
            raise RangeError(name, f"{name} must be finite")
    if p.g_1 not in (0.0, 1.0):
        # 0 is the decoupled limit; everything stays in units of the nominal g_1
        raise RangeError("g_1", "g_1 is the unit of frequency and must be 1 (or 0)")
    for name in _NONNEGATIVE:
        if getattr(p, name) < 0:
            raise RangeError(name, f"{name} must be >= 0, got {getattr(p, name)}")
    if abs(p.beta) > 1:
        raise RangeError("beta", f"beta must lie in [-1, 1], got {p.beta}")
    if not allow_unstable and p.P_a >= p.gamma_a:
        raise StabilityError(
            f"P_a={p.P_a} >= gamma_a={p.gamma_a}: cavity gain exceeds loss"
        )
    return p


def derived_rates(p: SystemParams) -> DerivedRates:
    return DerivedRates(
        gamma_12=p.beta * math.sqrt(p.gamma_1 * p.gamma_2),
        Gamma_a=p.gamma_a - p.P_a,
        Gamma_s1=p.gamma_1 + p.P_1,
        Gamma_s2=p.gamma_2 + p.P_2,
    )


def parse_params_text(text: str) -> SystemParams:
    """Parse the flat ``key=value`` parameter format.

    All ten keys are required; ``g_1`` is implicit and rejected if present.
    """
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "g_1":
            raise ValueError(f"line {lineno}: g_1 is the unit and may not be set")
        if key not in PARAM_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        if not _DECIMAL.match(value):
            raise ValueError(f"line {lineno}: {key} is not a decimal number: {value!r}")
        values[key] = float(value)
    missing = [k for k in PARAM_KEYS if k not in values]
    if missing:
        raise ValueError("missing keys: " + ", ".join(missing))
    return SystemParams(**values)


def load_params(path: str | Path) -> SystemParams:
    return parse_params_text(Path(path).read_text(encoding="utf-8"))


def format_params(p: SystemParams) -> str:
    return "".join(f"{k}={getattr(p, k)!r}\n" for k in PARAM_KEYS)
