"""Command-line interface binding configs to the simulator operations.

Subcommands: zz, zz-sweep, chi-sweep, dynamics, gate-report, optimize,
sweep1d, sweep2d. Devices and pulses come from named presets or TOML
files (device keys q1/coupler/q2 with freq_ghz, anh_ghz, levels plus
g1c_ghz/g2c_ghz; pulse keys amp0_ghz, lambda1, lambda2, t_f_ns,
detuning_ghz). Grids are start:stop:count triples; the worker pool size
comes from the CZSIM_WORKERS environment variable.

Output tables are comma-delimited text whose '#' header records the tool
version and the fully resolved configuration, never timestamps, so the
same invocation produces byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from ._parallel import ordered_map
from .calibrate import (
    OptimizeSettings,
    optimize_pulse,
    sweep_2d,
    sweep_detuning,
)
from .device import (
    DEVICE_PRESETS,
    DeviceParams,
    TransmonParams,
    device_preset,
)
from .errors import AmbiguousLabelingError, CzsimError
from .metrics import gate_report
from .propagator import EvolutionSettings, evolve_trajectory
from .pulse import PULSE_PRESETS, PulseParams, pulse_preset
from .spectrum import coupler_transitions, zz_report, zz_sweep


class ConfigError(CzsimError):
    """Malformed CLI input: unknown preset, bad file, bad key, bad grid."""


_DEVICE_TOP_KEYS = ("q1", "coupler", "q2", "g1c_ghz", "g2c_ghz")
_TRANSMON_KEYS = ("freq_ghz", "anh_ghz", "levels")
_PULSE_KEYS = ("amp0_ghz", "lambda1", "lambda2", "t_f_ns", "detuning_ghz")


def _key_line(text: str, key: str) -> str:
    for num, line in enumerate(text.splitlines(), start=1):
        if key in line.split("#", 1)[0]:
            return f"line {num}"
    return "unknown line"


def _reject_unknown(mapping, allowed, text, where):
    for key in mapping:
        if key not in allowed:
            raise ConfigError(
                f"unknown key '{key}' in {where} ({_key_line(text, key)}); "
                f"allowed: {', '.join(allowed)}"
            )


def _require(mapping, key, where):
    if key not in mapping:
        raise ConfigError(f"missing key '{key}' in {where}")
    return mapping[key]


def _load_toml(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    text = raw.decode("utf-8")
    try:
        return tomllib.loads(text), text
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from None


def _transmon_from(section, text, where) -> TransmonParams:
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a table")
    _reject_unknown(section, _TRANSMON_KEYS, text, where)
    return TransmonParams(
        frequency=float(_require(section, "freq_ghz", where)),
        anharmonicity=float(_require(section, "anh_ghz", where)),
        levels=int(section.get("levels", 4)),
    )


def load_device(source: str) -> DeviceParams:
    """Resolve a device preset name or TOML file path."""
    if source in DEVICE_PRESETS:
        return device_preset(source)
    if not os.path.exists(source):
        known = ", ".join(sorted(DEVICE_PRESETS))
        raise ConfigError(
            f"'{source}' is neither a device preset ({known}) nor a file"
        )
    data, text = _load_toml(source)
    where = f"device config {source}"
    _reject_unknown(data, _DEVICE_TOP_KEYS, text, where)
    return DeviceParams(
        q1=_transmon_from(_require(data, "q1", where), text, f"{where} [q1]"),
        coupler=_transmon_from(
            _require(data, "coupler", where), text, f"{where} [coupler]"
        ),
        q2=_transmon_from(_require(data, "q2", where), text, f"{where} [q2]"),
        g1c=float(_require(data, "g1c_ghz", where)),
        g2c=float(_require(data, "g2c_ghz", where)),
    )


def load_pulse(source: str) -> PulseParams:
    """Resolve a pulse preset name or TOML file path."""
    if source in PULSE_PRESETS:
        return pulse_preset(source)
    if not os.path.exists(source):
        known = ", ".join(sorted(PULSE_PRESETS))
        raise ConfigError(
            f"'{source}' is neither a pulse preset ({known}) nor a file"
        )
    data, text = _load_toml(source)
    where = f"pulse config {source}"
    _reject_unknown(data, _PULSE_KEYS, text, where)
    return PulseParams(
        amp0=float(_require(data, "amp0_ghz", where)),
        lambda1=float(_require(data, "lambda1", where)),
        lambda2=float(_require(data, "lambda2", where)),
        t_f=float(_require(data, "t_f_ns", where)),
        detuning=float(_require(data, "detuning_ghz", where)),
    )


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:count, got '{spec}'")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"cannot parse grid '{spec}'") from None
    if count < 1:
        raise ConfigError(f"grid count must be >= 1, got {count}")
    return np.linspace(start, stop, count)


def _parse_initial(spec: str) -> tuple[float, float, float]:
    parts = spec.split(",")
    if len(parts) != 3:
        raise ConfigError(
            f"--init must be amp0,lambda1,lambda2, got '{spec}'"
        )
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"cannot parse --init '{spec}'") from None


# -- output tables ---------------------------------------------------------


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _device_config_lines(device: DeviceParams) -> list[str]:
    lines = []
    for name in ("q1", "coupler", "q2"):
        tp = getattr(device, name)
        lines.append(f"device.{name}.freq_ghz = {tp.frequency!r}")
        lines.append(f"device.{name}.anh_ghz = {tp.anharmonicity!r}")
        lines.append(f"device.{name}.levels = {tp.levels}")
    lines.append(f"device.g1c_ghz = {device.g1c!r}")
    lines.append(f"device.g2c_ghz = {device.g2c!r}")
    return lines


def _pulse_config_lines(pulse: PulseParams) -> list[str]:
    return [
        f"pulse.amp0_ghz = {pulse.amp0!r}",
        f"pulse.lambda1 = {pulse.lambda1!r}",
        f"pulse.lambda2 = {pulse.lambda2!r}",
        f"pulse.t_f_ns = {pulse.t_f!r}",
        f"pulse.detuning_ghz = {pulse.detuning!r}",
    ]


def _write_table(path, command, config_lines, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# czsim {__version__}\n")
        fh.write(f"# command = {command}\n")
        for line in config_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(v) for v in row) + "\n")


_SWEEP_COLUMNS = (
    "t_g_ns", "detuning_ghz", "leakage", "phase_error_rad", "infidelity",
    "amp0_ghz", "lambda1", "lambda2", "status",
)


def _sweep_rows(result) -> list[tuple]:
    return [row.astuple() for row in result]


# -- subcommands -----------------------------------------------------------


def _cmd_zz(args) -> int:
    device = load_device(args.device)
    report = zz_report(device)
    print(
        f"zeta_exact = {report.zeta_exact:+.4f} kHz "
        f"(|zeta_exact| = {abs(report.zeta_exact):.4f} kHz), "
        f"zeta_pert4 = {report.zeta_pert4:+.4f} kHz, "
        f"J_eff = {report.j_eff:+.4f} MHz"
    )
    if args.out:
        _write_table(
            args.out, "zz", _device_config_lines(device),
            ("zeta_exact_khz", "zeta_pert4_khz", "j_eff_mhz",
             "delta1_ghz", "delta2_ghz", "delta12_ghz"),
            [(report.zeta_exact, report.zeta_pert4, report.j_eff,
              report.delta1, report.delta2, report.delta12)],
        )
        print(f"wrote 1 row to {args.out}")
    return 0


def _cmd_zz_sweep(args) -> int:
    device = load_device(args.device)
    omega1 = (
        _parse_grid(args.omega1) if args.omega1
        else np.array([device.q1.frequency])
    )
    omega2 = _parse_grid(args.omega2)
    rows = zz_sweep(device, omega1, omega2)
    config = _device_config_lines(device) + [
        f"grid.omega1_ghz = {args.omega1 or repr(device.q1.frequency)}",
        f"grid.omega2_ghz = {args.omega2}",
    ]
    _write_table(
        args.out, "zz-sweep", config,
        ("omega1_ghz", "omega2_ghz", "zeta_exact_khz", "zeta_pert4_khz",
         "status"),
        [(r.omega1, r.omega2, r.zeta_exact, r.zeta_pert4, r.status)
         for r in rows],
    )
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _chi_cell(cell):
    device, g = cell
    sized = replace(device, g1c=g, g2c=g)
    try:
        chi = coupler_transitions(sized)
    except AmbiguousLabelingError:
        return (g, None, None, None, None, "failed")
    return (
        g,
        chi.omega_c[(0, 0)],
        chi.chi[(1, 0)],
        chi.chi[(0, 1)],
        chi.chi[(1, 1)],
        "ok",
    )


def _cmd_chi_sweep(args) -> int:
    device = load_device(args.device)
    grid = _parse_grid(args.g)
    rows = ordered_map(_chi_cell, [(device, float(g)) for g in grid])
    config = _device_config_lines(device) + [f"grid.g_ghz = {args.g}"]
    _write_table(
        args.out, "chi-sweep", config,
        ("g_ghz", "omega_c00_ghz", "chi10_mhz", "chi01_mhz", "chi11_mhz",
         "status"),
        rows,
    )
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _parse_initial_label(spec: str, device: DeviceParams):
    digits = spec.replace(",", "")
    if len(digits) != 3 or not digits.isdigit():
        raise ConfigError(
            f"--initial must be three digits like 101, got '{spec}'"
        )
    label = tuple(int(ch) for ch in digits)
    bounds = (device.q1.levels, device.coupler.levels, device.q2.levels)
    for value, bound in zip(label, bounds):
        if value >= bound:
            raise ConfigError(
                f"--initial {spec} exceeds the level truncation {bounds}"
            )
    return label


def _cmd_dynamics(args) -> int:
    device = load_device(args.device)
    pulse = load_pulse(args.pulse)
    initial = _parse_initial_label(args.initial, device)
    settings = EvolutionSettings(dt=args.dt, sample_stride=args.stride)
    trajectory = evolve_trajectory(device, pulse, settings, initial)
    labels = sorted(trajectory.populations)
    columns = ["time_ns", "leakage"] + [
        "pop_" + "".join(str(d) for d in label) for label in labels
    ]
    rows = []
    for k, t in enumerate(trajectory.times):
        rows.append(
            (t, trajectory.leakage_trace[k])
            + tuple(trajectory.populations[label][k] for label in labels)
        )
    config = (
        _device_config_lines(device)
        + _pulse_config_lines(pulse)
        + [
            f"evolution.dt_ns = {args.dt!r}",
            f"evolution.sample_stride = {args.stride}",
            f"initial = {''.join(str(d) for d in initial)}",
        ]
    )
    _write_table(args.out, "dynamics", config, columns, rows)
    print(
        f"wrote {len(rows)} samples to {args.out} "
        f"(final leakage {trajectory.leakage_trace[-1]:.3e})"
    )
    return 0


def _cmd_gate_report(args) -> int:
    device = load_device(args.device)
    pulse = load_pulse(args.pulse)
    report = gate_report(device, pulse, EvolutionSettings(dt=args.dt))
    t = report.theta
    pops = report.return_populations
    print(
        f"theta (rad): theta00 = {t[0]:+.6f}, theta10 = {t[1]:+.6f}, "
        f"theta01 = {t[2]:+.6f}, theta11 = {t[3]:+.6f}"
    )
    print(
        f"cond_phase = {report.cond_phase:+.6f} rad, "
        f"phase_error = {report.phase_error:.3e} rad"
    )
    print(f"leakage L1 = {report.leakage:.3e}")
    print(f"fidelity F = {report.fidelity:.6f}")
    print(
        "return populations: "
        f"{pops[0]:.6f}, {pops[1]:.6f}, {pops[2]:.6f}, {pops[3]:.6f}"
    )
    record = (
        t[0], t[1], t[2], t[3], report.cond_phase, report.phase_error,
        report.leakage, report.fidelity, pops[0], pops[1], pops[2], pops[3],
    )
    print("record: " + ",".join(_format_value(v) for v in record))
    if args.out:
        config = (
            _device_config_lines(device)
            + _pulse_config_lines(pulse)
            + [f"evolution.dt_ns = {args.dt!r}"]
        )
        _write_table(
            args.out, "gate-report", config,
            ("theta00_rad", "theta10_rad", "theta01_rad", "theta11_rad",
             "cond_phase_rad", "phase_error_rad", "leakage", "fidelity",
             "pop00", "pop10", "pop01", "pop11"),
            [record],
        )
        print(f"wrote 1 row to {args.out}")
    return 0


def _optimize_settings(args) -> OptimizeSettings:
    return OptimizeSettings(
        initial=_parse_initial(args.init) if args.init else None,
        max_evals=args.max_evals,
        cost_tol=args.cost_tol,
        simplex_scale=args.simplex_scale,
    )


def _cmd_optimize(args) -> int:
    device = load_device(args.device)
    settings = _optimize_settings(args)
    result = optimize_pulse(
        device, args.tg, args.detuning, settings,
        EvolutionSettings(dt=args.dt),
    )
    state = "converged" if result.converged else "not converged"
    pulse = result.pulse
    print(
        f"cost = {result.cost:.6e} after {result.n_evals} evaluations "
        f"({state}); amp0 = {pulse.amp0:.6f} GHz, "
        f"lambda1 = {pulse.lambda1:+.6f}, lambda2 = {pulse.lambda2:+.6f}; "
        f"F = {result.report.fidelity:.6f}"
    )
    if args.out:
        config = _device_config_lines(device) + [
            f"t_g_ns = {args.tg!r}",
            f"detuning_ghz = {args.detuning!r}",
            f"evolution.dt_ns = {args.dt!r}",
            f"optimize.max_evals = {settings.max_evals}",
            f"optimize.cost_tol = {settings.cost_tol!r}",
            f"optimize.simplex_scale = {settings.simplex_scale!r}",
            f"optimize.initial = {settings.initial!r}",
        ]
        _write_table(
            args.out, "optimize", config,
            ("t_g_ns", "detuning_ghz", "cost", "n_evals", "converged",
             "amp0_ghz", "lambda1", "lambda2", "leakage",
             "phase_error_rad", "infidelity"),
            [(args.tg, args.detuning, result.cost, result.n_evals,
              result.converged, pulse.amp0, pulse.lambda1, pulse.lambda2,
              result.report.leakage, result.report.phase_error,
              1.0 - result.report.fidelity)],
        )
        print(f"wrote 1 row to {args.out}")
    return 0


def _sweep_mode(args):
    if args.mode == "fixed":
        if not args.pulse:
            raise ConfigError("--mode fixed requires --pulse")
        return load_pulse(args.pulse)
    return _optimize_settings(args)


def _sweep_config(args, device, mode) -> list[str]:
    config = _device_config_lines(device)
    if isinstance(mode, PulseParams):
        config += _pulse_config_lines(mode)
    else:
        config += [
            f"optimize.max_evals = {mode.max_evals}",
            f"optimize.cost_tol = {mode.cost_tol!r}",
            f"optimize.simplex_scale = {mode.simplex_scale!r}",
            f"optimize.initial = {mode.initial!r}",
        ]
    config += [f"mode = {args.mode}", f"evolution.dt_ns = {args.dt!r}"]
    return config


def _cmd_sweep1d(args) -> int:
    device = load_device(args.device)
    mode = _sweep_mode(args)
    result = sweep_detuning(
        device, args.tg, _parse_grid(args.detuning), mode,
        EvolutionSettings(dt=args.dt),
    )
    config = _sweep_config(args, device, mode) + [
        f"t_g_ns = {args.tg!r}",
        f"grid.detuning_ghz = {args.detuning}",
    ]
    _write_table(
        args.out, "sweep1d", config, _SWEEP_COLUMNS, _sweep_rows(result)
    )
    print(f"wrote {len(result)} rows to {args.out}")
    return 0


def _cmd_sweep2d(args) -> int:
    device = load_device(args.device)
    mode = _sweep_mode(args)
    result = sweep_2d(
        device, _parse_grid(args.tg), _parse_grid(args.detuning), mode,
        EvolutionSettings(dt=args.dt),
    )
    config = _sweep_config(args, device, mode) + [
        f"grid.tg_ns = {args.tg}",
        f"grid.detuning_ghz = {args.detuning}",
    ]
    _write_table(
        args.out, "sweep2d", config, _SWEEP_COLUMNS, _sweep_rows(result)
    )
    print(f"wrote {len(result)} rows to {args.out}")
    return 0


# -- parser ----------------------------------------------------------------


def _add_device(parser):
    parser.add_argument(
        "--device", required=True,
        help="device preset name or TOML config path",
    )


def _add_pulse(parser, required):
    parser.add_argument(
        "--pulse", required=required, default=None,
        help="pulse preset name or TOML config path",
    )


def _add_dt(parser):
    parser.add_argument(
        "--dt", type=float, default=0.005,
        help="integration step in ns (default 0.005)",
    )


def _add_out(parser, required):
    parser.add_argument(
        "--out", required=required, default=None,
        help="output table path",
    )


def _add_optimizer_flags(parser):
    parser.add_argument(
        "--init", default=None,
        help="starting point amp0,lambda1,lambda2 (default: area heuristic)",
    )
    parser.add_argument("--max-evals", type=int, default=400)
    parser.add_argument("--cost-tol", type=float, default=1e-6)
    parser.add_argument("--simplex-scale", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="czsim",
        description=(
            "Pulse-level simulator and calibration toolkit for a "
            "microwave-activated CZ gate on a transmon-coupler-transmon "
            "device. Frequencies in GHz, times in ns."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"czsim {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zz", help="static ZZ report for one device")
    _add_device(p)
    _add_out(p, required=False)
    p.set_defaults(handler=_cmd_zz)

    p = sub.add_parser("zz-sweep", help="ZZ over qubit-frequency grids")
    _add_device(p)
    p.add_argument("--omega1", default=None, help="grid start:stop:count")
    p.add_argument("--omega2", required=True, help="grid start:stop:count")
    _add_out(p, required=True)
    p.set_defaults(handler=_cmd_zz_sweep)

    p = sub.add_parser(
        "chi-sweep", help="coupler transition shifts vs coupling strength"
    )
    _add_device(p)
    p.add_argument(
        "--g", required=True,
        help="qubit-coupler coupling grid start:stop:count (GHz, g1c=g2c)",
    )
    _add_out(p, required=True)
    p.set_defaults(handler=_cmd_chi_sweep)

    p = sub.add_parser(
        "dynamics", help="bare-state populations during one gate"
    )
    _add_device(p)
    _add_pulse(p, required=True)
    _add_dt(p)
    p.add_argument(
        "--stride", type=int, default=100,
        help="sample every this many steps (default 100)",
    )
    p.add_argument(
        "--initial", default="101",
        help="initial dressed state as three digits (default 101)",
    )
    _add_out(p, required=True)
    p.set_defaults(handler=_cmd_dynamics)

    p = sub.add_parser("gate-report", help="gate metrics for one pulse")
    _add_device(p)
    _add_pulse(p, required=True)
    _add_dt(p)
    _add_out(p, required=False)
    p.set_defaults(handler=_cmd_gate_report)

    p = sub.add_parser(
        "optimize", help="calibrate pulse parameters at one operating point"
    )
    _add_device(p)
    p.add_argument("--tg", type=float, required=True, help="gate time, ns")
    p.add_argument(
        "--detuning", type=float, required=True,
        help="drive detuning from the coupler transition, GHz",
    )
    _add_optimizer_flags(p)
    _add_dt(p)
    _add_out(p, required=False)
    p.set_defaults(handler=_cmd_optimize)

    p = sub.add_parser("sweep1d", help="detuning sweep at fixed gate time")
    _add_device(p)
    p.add_argument("--tg", type=float, required=True, help="gate time, ns")
    p.add_argument(
        "--detuning", required=True, help="grid start:stop:count (GHz)"
    )
    p.add_argument("--mode", choices=("fixed", "optimize"), default="fixed")
    _add_pulse(p, required=False)
    _add_optimizer_flags(p)
    _add_dt(p)
    _add_out(p, required=True)
    p.set_defaults(handler=_cmd_sweep1d)

    p = sub.add_parser("sweep2d", help="gate-time x detuning sweep")
    _add_device(p)
    p.add_argument("--tg", required=True, help="grid start:stop:count (ns)")
    p.add_argument(
        "--detuning", required=True, help="grid start:stop:count (GHz)"
    )
    p.add_argument("--mode", choices=("fixed", "optimize"), default="fixed")
    _add_pulse(p, required=False)
    _add_optimizer_flags(p)
    _add_dt(p)
    _add_out(p, required=True)
    p.set_defaults(handler=_cmd_sweep2d)

    return parser


_VALUE_FLAGS = ("--detuning", "--tg", "--omega1", "--omega2", "--g", "--init")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Rewrite `--detuning -15e-3:...` as `--detuning=-15e-3:...`.

    argparse only tolerates a leading dash on values shaped like plain
    negative numbers; grid triples and comma lists need the `=` form,
    which this applies automatically.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            nxt = argv[i + 1]
            if len(nxt) > 1 and nxt[0] == "-" and (
                nxt[1].isdigit() or nxt[1] == "."
            ):
                out.append(f"{tok}={nxt}")
                i += 2
                continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CzsimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
