"""Command-line front end.

Data files are deterministic (fixed 17-digit formatting, no timestamps); the
wall time and timestamp go into a ``*.manifest.json`` written next to them.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, dressed, presets, regression, spectra
from . import liouvillian as lv
from .core import PARAM_KEYS, SystemParams, load_params, validate_params
from .errors import (
    DimensionError,
    NonPositiveDissipatorError,
    RangeError,
    StabilityError,
    TripletNotFoundError,
    UndefinedAngleError,
)

ASCII_KEYS = ("n_a", "n_as1", "n_s1a", "n_s1", "n_s1s2", "n_as2", "n_s2a", "n_s2", "n_s2s1")
CHANNEL_FLAGS = {"a": "cavity", "sigma1": "exciton1", "sigma2": "exciton2"}
# exit 2; RangeError and plain ValueError are bad input and exit 1
NUMERICAL_ERRORS = (
    StabilityError,
    TripletNotFoundError,
    NonPositiveDissipatorError,
    DimensionError,
    UndefinedAngleError,
    ArithmeticError,
    RuntimeError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(path: Path, header: list[str], columns) -> None:
    rows = [",".join(header)]
    rows += [",".join(fmt(float(v)) for v in row) for row in zip(*columns)]
    _atomic_write(path, "\n".join(rows) + "\n")


def write_spectrum_csv(path: Path, s: spectra.SpectrumResult) -> None:
    write_csv(path, ["omega_minus_omega_a", "S"], [s.omega, s.values])


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _jsonable(x):
    if isinstance(x, complex) or isinstance(x, np.complexfloating):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def manifest(command: str, params=None, flags=None, grid=None, started=0.0, extra=None) -> dict:
    return {
        "command": command,
        "params": params,
        "flags": flags or {},
        "grid": grid,
        "version": __version__,
        "wall_time_s": time.perf_counter() - started,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        **(extra or {}),
    }


def write_manifest(data_path: Path, man: dict) -> None:
    if data_path.suffix:
        target = data_path.with_suffix(data_path.suffix + ".manifest.json")
    else:
        target = data_path / "manifest.json"
    _atomic_write(target, dump_json(_jsonable(man)))


def resolve_params(spec: str) -> SystemParams:
    if spec in presets.PRESETS:
        return presets.PRESETS[spec]
    try:
        return load_params(spec)
    except FileNotFoundError as exc:
        raise UsageError(f"--params: no such file or preset: {spec}") from exc
    except ValueError as exc:
        raise UsageError(f"--params {spec}: {exc}") from exc


def _grid(args) -> np.ndarray:
    if args.points < 3:
        raise UsageError("--points must be >= 3")
    if not args.omega_max > args.omega_min:
        raise UsageError("--omega-max must exceed --omega-min")
    return np.linspace(args.omega_min, args.omega_max, args.points)


def _grid_spec(args) -> dict:
    return {"omega_min": args.omega_min, "omega_max": args.omega_max, "points": args.points}


def _add_grid(sp, lo=-5.0, hi=5.0, points=4001):
    sp.add_argument("--omega-min", type=float, default=lo)
    sp.add_argument("--omega-max", type=float, default=hi)
    sp.add_argument("--points", type=int, default=points)


def cmd_spectrum(args, t0):
    p = resolve_params(args.params)
    s = spectra.emission_spectrum(
        p, CHANNEL_FLAGS[args.channel], _grid(args), args.mode, args.matrix
    )
    out = Path(args.out)
    write_spectrum_csv(out, s)
    flags = {"channel": args.channel, "mode": args.mode, "matrix": args.matrix}
    write_manifest(out, manifest("spectrum", asdict(p), flags, _grid_spec(args), t0))


def _steady_payload(values) -> dict:
    return {k: [float(v.real), float(v.imag)] for k, v in zip(ASCII_KEYS, values)}


def cmd_steady_state(args, t0):
    p = resolve_params(args.params)
    reg = regression.steady_state_9(p, args.matrix).values
    if not args.oracle:
        payload = _steady_payload(reg)
    else:
        m = lv.model_three_level_cavity(p, args.cutoff)
        orc = lv.observables_9(m, lv.steady_state_density(m))
        payload = {
            k: {
                "regression": [float(r.real), float(r.imag)],
                "oracle": [float(o.real), float(o.imag)],
                "relative_delta": float(abs(r - o) / abs(o)) if abs(o) > 0 else None,
            }
            for k, r, o in zip(ASCII_KEYS, reg, orc)
        }
    _emit_json(args, payload, "steady-state", asdict(p), {"matrix": args.matrix, "oracle": args.oracle, "cutoff": args.cutoff}, t0)


def _emit_json(args, payload, command, params, flags, t0):
    text = dump_json(payload)
    sys.stdout.write(text)
    if getattr(args, "out", None):
        out = Path(args.out)
        _atomic_write(out, text)
        write_manifest(out, manifest(command, params, flags, None, t0))


def cmd_oracle_spectrum(args, t0):
    p = resolve_params(args.params)
    m = lv.model_three_level_cavity(p, args.cutoff)
    tau_max = args.tau_max
    if tau_max is None:
        tau_max = 40.0 / regression.solve(p).eig.lambdas.real.min()
    s = lv.oracle_spectrum(m, _grid(args), tau_max, args.tau_points)
    out = Path(args.out)
    write_spectrum_csv(out, s)
    flags = {"cutoff": args.cutoff, "tau_max": tau_max, "tau_points": args.tau_points}
    write_manifest(out, manifest("oracle-spectrum", asdict(p), flags, _grid_spec(args), t0))


def mollow_spectrum(rabi: float, gamma: float, detuning: float = 0.0, points: int = 12001):
    """Incoherent fluorescence spectrum of the driven two-level emitter."""
    m = lv.model_driven_qubit(rabi, gamma, detuning)
    half = 1.5 * math.hypot(2 * rabi, detuning) + 20 * gamma
    omega = np.linspace(-half, half, points)
    tau_max = 40.0 / (0.5 * gamma)
    # resolve the fastest oscillation with >= 10 samples per period
    tau_points = max(2048, int(math.ceil(tau_max * half / (2 * math.pi) * 10)))
    return lv.oracle_spectrum(m, omega, tau_max, tau_points, A="sigma", connected=True)


def cmd_mollow(args, t0):
    s = mollow_spectrum(args.rabi, args.gamma, args.detuning)
    out = Path(args.out)
    write_spectrum_csv(out, s)
    try:
        ratios = spectra.mollow_ratios(s)
    except Exception as exc:  # noqa: BLE001 - ratios are diagnostics only
        ratios = {"error": str(exc)}
    sys.stdout.write(dump_json(ratios))
    flags = {"rabi": args.rabi, "gamma": args.gamma, "detuning": args.detuning}
    write_manifest(out, manifest("mollow", None, flags, None, t0, {"ratios": ratios}))


def cmd_g2(args, t0):
    p = resolve_params(args.params)
    m = lv.model_three_level_cavity(p, args.cutoff)
    s1 = lv.SensorSpec(args.omega1, args.gamma1, args.eps)
    s2 = lv.SensorSpec(args.omega2, args.gamma2, args.eps)
    r = lv.sensor_g2(m, s1, s2)
    payload = {"g2": r.g2, "g2_half_eps": r.g2_half, "eps_delta": r.delta, "n1": r.n1, "n2": r.n2, "n12": r.n12}
    flags = {k: getattr(args, k) for k in ("omega1", "gamma1", "omega2", "gamma2", "eps", "cutoff")}
    _emit_json(args, payload, "g2", asdict(p), flags, t0)


def _dressed_params(args) -> dressed.DressedParams:
    return dressed.DressedParams(
        N=args.N,
        Omega=args.Omega,
        delta_1=args.delta1,
        delta_2=args.delta2,
        g=args.g,
        gamma=args.gamma,
        Gamma_cav=args.Gamma,
        gamma1_d=args.gamma1_d,
        gamma2_d=args.gamma2_d,
        lambda_1=args.lambda1,
    )


def cmd_dressed(args, t0):
    p = _dressed_params(args)
    flags = {"what": args.what, "inversion_mode": args.inversion_mode}
    alpha = dressed.mixing_angle(p.Omega, p.delta_1)
    w = dressed.generalized_rabi(p.Omega, p.delta_1)
    if args.what == "angle":
        payload = {"alpha": alpha, "omega_prime": w}
    elif args.what == "inversion":
        payload = {"alpha": alpha, "s3_bar": dressed.inversion_bar(p.N, alpha, args.inversion_mode)}
    elif args.what == "margin":
        payload = {
            "rhs": dressed.threshold_rhs(p),
            "margin": dressed.lasing_margin(p),
            "delta_L": dressed.pulled_frequency(p.gamma1_d, p.Gamma_cav, p.delta_2, w),
        }
    else:
        if not args.out:
            raise UsageError("dressed simulate requires --out")
        s0 = dressed.SemiclassicalState(complex(args.S0), args.S3_0, complex(args.a0))
        tr = dressed.integrate_semiclassical(p, s0, args.t_max, args.dt, args.inversion_mode)
        out = Path(args.out)
        write_csv(
            out,
            ["t", "S_re", "S_im", "S3", "a_re", "a_im"],
            [tr.t, tr.S.real, tr.S.imag, tr.S3, tr.a.real, tr.a.imag],
        )
        write_manifest(out, manifest("dressed simulate", asdict(p), flags, None, t0))
        return
    _emit_json(args, payload, f"dressed {args.what}", asdict(p), flags, t0)


def _format_value(x: float) -> str:
    return f"{x:g}"


def cmd_sweep(args, t0):
    p = resolve_params(args.params)
    if args.vary not in PARAM_KEYS:
        raise UsageError(f"--vary must be one of {', '.join(PARAM_KEYS)}")
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--values: {exc}") from exc
    out = Path(args.out)
    grid = _grid(args)
    done = []
    for v in values:
        q = p.replace(**{args.vary: v})
        s = spectra.emission_spectrum(q, CHANNEL_FLAGS[args.channel], grid, args.mode, args.matrix)
        name = f"{args.vary}={_format_value(v)}.csv"
        write_spectrum_csv(out / name, s)
        done.append(name)
    flags = {"vary": args.vary, "values": values, "channel": args.channel, "mode": args.mode, "matrix": args.matrix}
    write_manifest(out, manifest("sweep", asdict(p), flags, _grid_spec(args), t0, {"files": done}))


def cmd_figures(args, t0):
    out = Path(args.out)
    channel = presets.FIGURE_CHANNEL[args.set]
    grid = _grid(args)
    files, skipped = [], {}
    for name, p in presets.figure_panels(args.set):
        try:
            s = spectra.emission_spectrum(p, channel, grid)
        except (StabilityError, ArithmeticError) as exc:
            skipped[name] = f"{type(exc).__name__}: {exc}"
            print(f"fig{args.set} {name}: skipped ({type(exc).__name__})", file=sys.stderr)
            continue
        fname = f"fig{args.set}_{name}.csv"
        write_spectrum_csv(out / fname, s)
        files.append(fname)
    extra = {"channel": channel, "files": files, "skipped": skipped}
    write_manifest(out, manifest("figures", None, {"set": args.set}, _grid_spec(args), t0, extra))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vee-spectra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="regression emission spectrum")
    sp.add_argument("--params", required=True, help="parameter file or preset (fig2..fig6)")
    sp.add_argument("--channel", choices=list(CHANNEL_FLAGS), default="a")
    sp.add_argument("--mode", choices=spectra.SPECTRUM_MODES, default="exact")
    sp.add_argument("--matrix", choices=regression.MATRIX_MODES, default="corrected")
    _add_grid(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("steady-state", help="nine single-time moments")
    sp.add_argument("--params", required=True)
    sp.add_argument("--matrix", choices=regression.MATRIX_MODES, default="corrected")
    sp.add_argument("--oracle", action="store_true", help="also solve the full Lindblad model")
    sp.add_argument("--cutoff", type=int, default=lv.DEFAULT_CUTOFF)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_steady_state)

    sp = sub.add_parser("oracle-spectrum", help="cavity spectrum from the Lindblad oracle")
    sp.add_argument("--params", required=True)
    sp.add_argument("--cutoff", type=int, default=10)
    sp.add_argument("--tau-max", type=float, default=None)
    sp.add_argument("--tau-points", type=int, default=2048)
    _add_grid(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_oracle_spectrum)

    sp = sub.add_parser("mollow", help="fluorescence spectrum of a driven two-level emitter")
    sp.add_argument("--rabi", type=float, required=True)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--detuning", type=float, default=0.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_mollow)

    sp = sub.add_parser("g2", help="filtered g2 of the cavity field via two sensors")
    sp.add_argument("--params", required=True)
    sp.add_argument("--omega1", type=float, default=0.0)
    sp.add_argument("--gamma1", type=float, required=True)
    sp.add_argument("--omega2", type=float, default=0.0)
    sp.add_argument("--gamma2", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--cutoff", type=int, default=8)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_g2)

    sp = sub.add_parser("dressed", help="dressed-state laser quantities")
    sp.add_argument("what", choices=["angle", "inversion", "margin", "simulate"])
    sp.add_argument("--N", type=int, default=1)
    sp.add_argument("--Omega", type=float, default=0.0)
    sp.add_argument("--delta1", type=float, default=0.0)
    sp.add_argument("--delta2", type=float, default=0.0)
    sp.add_argument("--g", type=float, default=0.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--Gamma", type=float, default=1.0)
    sp.add_argument("--gamma1-d", type=float, default=1.0)
    sp.add_argument("--gamma2-d", type=float, default=1.0)
    sp.add_argument("--lambda1", type=float, default=0.0)
    sp.add_argument("--inversion-mode", choices=dressed.INVERSION_MODES, default="verbatim")
    sp.add_argument("--S0", type=complex, default=0j)
    sp.add_argument("--S3-0", type=float, default=0.0)
    sp.add_argument("--a0", type=complex, default=0j)
    sp.add_argument("--t-max", type=float, default=10.0)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_dressed)

    sp = sub.add_parser("sweep", help="one spectrum file per parameter value")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vary", required=True)
    sp.add_argument("--values", required=True, help="comma-separated list")
    sp.add_argument("--channel", choices=list(CHANNEL_FLAGS), default="a")
    sp.add_argument("--mode", choices=spectra.SPECTRUM_MODES, default="exact")
    sp.add_argument("--matrix", choices=regression.MATRIX_MODES, default="corrected")
    _add_grid(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("figures", help="data behind each figure panel")
    sp.add_argument("--set", type=int, choices=[2, 3, 4, 5, 6], required=True)
    _add_grid(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_figures)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        args.func(args, t0)
    except UsageError as exc:
        print(f"vee-spectra: error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"vee-spectra: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (RangeError, ValueError) as exc:
        print(f"vee-spectra: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
