"""Command-line front end.

Config files are flat dotted-key text, one ``key = value`` per line with
``#`` comments. All frequencies in configs and CSV columns suffixed _hz
are plain Hz; conversion to the library's internal rad/s happens here.
Unset keys fall back to the reference device defaults, so every
subcommand runs with zero configuration.

Output files are byte-deterministic: fixed column schemas, 17 significant
digits, and a ``# key = value`` comment header capturing the fully
resolved config and flags, sufficient to reproduce the run.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

from .core import (
    ConfigParseError,
    CoupledSystem,
    EpgwError,
    InvalidRangeError,
    MechanicalResonator,
    NoEPError,
    NonPositiveParameterError,
    NotAtEPError,
    SamplingTooCoarseError,
    SensitivityContext,
    TooFewSamplesError,
    UnknownKeyError,
    ValidationError,
    ZeroCouplingError,
    balanced_system,
    drive_amplitude_from_thickness,
    system_violations,
    validate_system,
)
from .dynamics import estimate_spectrum, propagate_exact
from .sensitivity import read_overlay_csv, sensitivity_curve
from .spectral import (
    EpConvention,
    ep_photon_number,
    eigenvalues_general,
    optomech_damping,
    detuning_response,
    sweep_photon_number,
    sweep_strain,
    vacuum_coupling,
    zero_point_fluctuation,
)

TWO_PI = 2.0 * math.pi

# Reference device. Order fixed: serialization follows this sequence.
CONFIG_DEFAULTS: dict[str, float | None] = {
    "resonator.frequency_hz": 1e9,
    "resonator.mass_kg": 5.3e-15,
    "resonator.thickness_m": 8e-8,
    "resonator.quality_factor": 1e5,
    "resonator.gamma_m_hz": 0.0,
    "cavity.length_m": 1e-4,
    "cavity.decay_rate_hz": 1e8,
    "coupling.j_hz": 1e7,
    "drive.photon_number": None,
    "noise.temperature_k": 300.0,
    "noise.sample_time_s": 1.0,
    "sensitivity.t_max_s": 3600.0,
}

_ATTR = {key: key.replace(".", "_") for key in CONFIG_DEFAULTS}


class _UsageError(EpgwError):
    """Bad command line (unknown flag, missing argument, bad choice)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep exit-code control in main()
        raise _UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run settings (user-facing units: Hz, kg, m, K, s)."""

    resonator_frequency_hz: float = 1e9
    resonator_mass_kg: float = 5.3e-15
    resonator_thickness_m: float = 8e-8
    resonator_quality_factor: float = 1e5
    resonator_gamma_m_hz: float = 0.0
    cavity_length_m: float = 1e-4
    cavity_decay_rate_hz: float = 1e8
    coupling_j_hz: float = 1e7
    drive_photon_number: float | None = None
    noise_temperature_k: float = 300.0
    noise_sample_time_s: float = 1.0
    sensitivity_t_max_s: float = 3600.0

    def resonator(self) -> MechanicalResonator:
        return MechanicalResonator(
            omega_m=TWO_PI * self.resonator_frequency_hz,
            mass=self.resonator_mass_kg,
            quality_factor=self.resonator_quality_factor,
            thickness=self.resonator_thickness_m,
            gamma_m=TWO_PI * self.resonator_gamma_m_hz,
        )

    def system(self, n_cav: float | None = None) -> CoupledSystem:
        """Balanced blue/red system; n_cav defaults to drive.photon_number or 0."""
        if n_cav is None:
            n_cav = self.drive_photon_number if self.drive_photon_number is not None else 0.0
        return balanced_system(
            self.resonator(),
            length=self.cavity_length_m,
            kappa=TWO_PI * self.cavity_decay_rate_hz,
            coupling_j=TWO_PI * self.coupling_j_hz,
            n_cav=n_cav,
        )

    def context(self) -> SensitivityContext:
        return SensitivityContext(
            temperature=self.noise_temperature_k,
            sample_time=self.noise_sample_time_s,
            drive_amplitude=drive_amplitude_from_thickness(self.resonator_thickness_m),
            quality_factor=self.resonator_quality_factor,
        )

    def coupling_rad_s(self) -> float:
        return TWO_PI * self.coupling_j_hz

    def to_text(self) -> str:
        """Serialize to the config format (keys in canonical order)."""
        lines = []
        for key in CONFIG_DEFAULTS:
            value = getattr(self, _ATTR[key])
            if value is None:
                continue
            lines.append(f"{key} = {value!r}")
        return "\n".join(lines) + "\n"


def _parse_into(values: dict, text: str) -> None:
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(line_no, f"expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_DEFAULTS:
            raise UnknownKeyError(key)
        if not value:
            raise ConfigParseError(line_no, f"missing value for {key!r}")
        try:
            values[key] = float(value)
        except ValueError:
            raise ConfigParseError(line_no, f"not a number: {value!r}") from None


def _validate_config(cfg: RunConfig) -> None:
    # coupling.j_hz = 0 deliberately survives config validation: ep-locate
    # reports it as the domain condition ZeroCoupling, not a config error.
    # Negative J and everything else still fail here.
    system = cfg.system()
    violations = [
        v
        for v in system_violations(system)
        if not (v.name == "coupling_j" and system.coupling_j == 0.0)
    ]
    ctx_checks = (
        ("temperature", cfg.noise_temperature_k, "noise"),
        ("sample_time", cfg.noise_sample_time_s, "noise"),
        ("t_max", cfg.sensitivity_t_max_s, "sensitivity"),
    )
    for name, value, where in ctx_checks:
        if not value > 0:
            violations.append(NonPositiveParameterError(name, value, where))
    if violations:
        raise ValidationError(violations)


def parse_config(path: str | None, overrides: dict[str, float] | None = None) -> RunConfig:
    """Load a config file (optional), apply overrides, validate, return.

    Args:
        path: Config file path, or None for pure defaults.
        overrides: Dotted-key values that win over the file (CLI flags).

    Raises:
        ConfigParseError, UnknownKeyError: malformed input.
        ValidationError: any physical field out of range.
        OSError: unreadable file.
    """
    values = dict(CONFIG_DEFAULTS)
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            _parse_into(values, fh.read())
    for key, value in (overrides or {}).items():
        if key not in CONFIG_DEFAULTS:
            raise UnknownKeyError(key)
        values[key] = value
    cfg = RunConfig(**{_ATTR[key]: value for key, value in values.items()})
    _validate_config(cfg)
    return cfg


def parse_config_text(text: str) -> RunConfig:
    """parse_config for in-memory text (tests, round-trips)."""
    values = dict(CONFIG_DEFAULTS)
    _parse_into(values, text)
    cfg = RunConfig(**{_ATTR[key]: value for key, value in values.items()})
    _validate_config(cfg)
    return cfg


# ---------------------------------------------------------------------------
# deterministic emission
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return _fmt(value)


def _header_lines(cfg: RunConfig, command: str, flags: dict) -> list[str]:
    lines = [f"# command = {command}"]
    for key in CONFIG_DEFAULTS:
        value = getattr(cfg, _ATTR[key])
        if value is None:
            continue
        lines.append(f"# {key} = {value!r}")
    for name in sorted(flags):
        lines.append(f"# flag.{name} = {flags[name]!r}")
    return lines


def render_csv(
    cfg: RunConfig,
    command: str,
    flags: dict,
    columns: list[str],
    rows: list[list],
    overlays: dict[str, list[tuple[float, float]]] | None = None,
) -> str:
    out = _header_lines(cfg, command, flags)
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(_cell(value) for value in row))
    for name in sorted(overlays or {}):
        out.append(f"# overlay = {name}")
        out.append("frequency_hz,strain")
        for f, h in overlays[name]:
            out.append(f"{_fmt(f)},{_fmt(h)}")
    return "\n".join(out) + "\n"


def render_json(
    cfg: RunConfig,
    command: str,
    flags: dict,
    columns: list[str],
    rows: list[list],
    overlays: dict[str, list[tuple[float, float]]] | None = None,
) -> str:
    payload = {
        "command": command,
        "config": {key: getattr(cfg, _ATTR[key]) for key in CONFIG_DEFAULTS},
        "flags": flags,
        "columns": columns,
        "rows": rows,
    }
    if overlays:
        payload["overlays"] = {name: [list(pair) for pair in table] for name, table in overlays.items()}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(args, cfg, command, flags, columns, rows, overlays=None, default_format="csv"):
    if args.output is None:
        return
    fmt = args.format or default_format
    render = render_csv if fmt == "csv" else render_json
    text = render(cfg, command, flags, columns, rows, overlays)
    with open(args.output, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {args.output} ({fmt}, {len(rows)} rows)")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_ep_locate(cfg: RunConfig, args) -> int:
    convention = EpConvention(args.ep_convention)
    system = cfg.system(n_cav=0.0)
    violations = [
        v
        for v in system_violations(system)
        if not (v.name == "coupling_j" and system.coupling_j == 0.0)
    ]
    if violations:
        raise ValidationError(violations)
    if system.coupling_j == 0.0:
        raise ZeroCouplingError("coupling.j_hz is zero; the spectrum has no exceptional point")

    n0 = ep_photon_number(system, convention)
    resonator = cfg.resonator()
    g0 = vacuum_coupling(system.cavity_1, zero_point_fluctuation(resonator))
    phi = detuning_response(system.cavity_1, resonator.omega_m)
    biased = system.with_photon_number(n0)
    arm_1 = optomech_damping(biased.cavity_1, resonator, g0)
    arm_2 = optomech_damping(biased.cavity_2, resonator, g0)
    pair = eigenvalues_general(biased, convention)

    print(f"n0 = {n0:.6e}")
    print(f"g0 = {g0:.6e} rad/s ({g0 / TWO_PI:.6e} Hz)")
    print(f"phi = {phi:.6e} s  (arm 1, blue-detuned)")
    print(f"gamma_1 = {arm_1.gamma_total:.6e} rad/s")
    print(f"gamma_2 = {arm_2.gamma_total:.6e} rad/s")
    print(f"convention = {convention.value}")
    print(f"phase at n0 = {pair.phase.value}")

    flags = {"ep_convention": convention.value}
    columns = ["n0", "g0_rad_s", "phi_s", "gamma_1_rad_s", "gamma_2_rad_s"]
    rows = [[n0, g0, phi, arm_1.gamma_total, arm_2.gamma_total]]
    _emit(args, cfg, "ep-locate", flags, columns, rows, default_format="json")
    return 0


def cmd_sweep_ncav(cfg: RunConfig, args) -> int:
    convention = EpConvention(args.ep_convention)
    system = validate_system(cfg.system(n_cav=0.0))
    table = sweep_photon_number(
        system, args.min, args.max, args.points, log=args.log, convention=convention
    )
    columns = ["n_cav", "re_plus_hz", "re_minus_hz", "im_plus_hz", "im_minus_hz", "phase"]
    rows = [
        [
            n,
            pair.lambda_plus.real / TWO_PI,
            pair.lambda_minus.real / TWO_PI,
            pair.lambda_plus.imag / TWO_PI,
            pair.lambda_minus.imag / TWO_PI,
            pair.phase.value,
        ]
        for n, pair in table
    ]
    transitions = sum(1 for a, b in zip(table, table[1:]) if a[1].phase is not b[1].phase)
    print(f"{len(rows)} rows, {transitions} phase transition(s)")
    flags = {
        "min": args.min,
        "max": args.max,
        "points": args.points,
        "log": args.log,
        "ep_convention": convention.value,
    }
    _emit(args, cfg, "sweep-ncav", flags, columns, rows)
    return 0


def cmd_sweep_strain(cfg: RunConfig, args) -> int:
    convention = EpConvention(args.ep_convention)
    system = validate_system(cfg.system(n_cav=0.0))
    n0 = ep_photon_number(system, convention)
    results = sweep_strain(
        system, n0, args.min, args.max, args.points, log=args.log, convention=convention
    )
    columns = ["h", "d_exact_rad_s", "d_approx_rad_s", "linewidth_split_rad_s", "rel_err"]
    rows = [
        [r.strain, r.d_exact, r.d_approx, r.linewidth_split, r.rel_error] for r in results
    ]
    worst = max((r.rel_error for r in results), default=0.0)
    print(f"{len(rows)} rows at n0 = {n0:.6e}; max |d_exact - d_approx|/d_approx = {worst:.3e}")
    flags = {
        "min": args.min,
        "max": args.max,
        "points": args.points,
        "log": args.log,
        "n0": n0,
        "ep_convention": convention.value,
    }
    _emit(args, cfg, "sweep-strain", flags, columns, rows)
    return 0


def cmd_sensitivity(cfg: RunConfig, args) -> int:
    validate_system(cfg.system(n_cav=0.0))
    curve = sensitivity_curve(
        cfg.context(),
        cfg.resonator(),
        cfg.coupling_rad_s(),
        args.fmin,
        args.fmax,
        args.points,
        t_max=cfg.sensitivity_t_max_s,
        half_period_cap=(args.tau_rule == "half"),
    )
    overlays = {}
    for path in args.overlay or []:
        overlays[os.path.basename(path)] = read_overlay_csv(path)
    columns = ["frequency_hz", "observation_time_s", "h_min"]
    rows = [[p.gw_frequency, p.observation_time, p.h_min] for p in curve]
    print(
        f"{len(rows)} rows; floor h_min = {min(p.h_min for p in curve):.6e} "
        f"at t_max = {cfg.sensitivity_t_max_s:g} s"
    )
    flags = {
        "fmin": args.fmin,
        "fmax": args.fmax,
        "points": args.points,
        "tau_rule": args.tau_rule,
        "overlay": sorted(overlays),
    }
    _emit(args, cfg, "sensitivity", flags, columns, rows, overlays)
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    convention = EpConvention(args.ep_convention)
    system = validate_system(cfg.system(n_cav=0.0))

    if args.photon_number is not None:
        n_cav = args.photon_number
    elif cfg.drive_photon_number is not None:
        n_cav = cfg.drive_photon_number
    else:
        n_cav = ep_photon_number(system, convention)

    # Strain rescales both vacuum couplings g0 -> g0 (1 - 2h); in the mode
    # matrix that is exactly a photon-number rescale by (1 - 2h)^2.
    h = args.strain
    strained = system.with_photon_number(n_cav * (1.0 - 2.0 * h) ** 2)
    pair = eigenvalues_general(strained, convention)
    predicted = (pair.lambda_plus.real, pair.lambda_minus.real)

    if args.dt is not None:
        dt = args.dt
    else:
        fastest = max(abs(predicted[0]), abs(predicted[1]))
        if fastest == 0.0:
            raise InvalidRangeError("eigenfrequencies are zero; give --dt explicitly")
        dt = 0.1 * TWO_PI / fastest
    if args.duration is not None:
        duration = args.duration
    else:
        split = predicted[0] - predicted[1]
        if split <= 0.0:
            raise InvalidRangeError(
                "frequency splitting is zero (at or beyond the EP); give --duration explicitly"
            )
        duration = 100.0 * TWO_PI / split

    trajectory = propagate_exact(strained, (1.0 + 0.0j, 0.0j), duration, dt)
    estimate = estimate_spectrum(trajectory)

    columns = ["peak", "frequency_hz", "linewidth_hz", "predicted_hz", "resolution_hz"]
    rows = []
    for index, (freq, width) in enumerate(
        zip(estimate.peak_frequencies, estimate.peak_linewidths)
    ):
        nearest = min(predicted, key=lambda p: abs(p - freq))
        rows.append(
            [index, freq / TWO_PI, width / TWO_PI, nearest / TWO_PI, estimate.resolution / TWO_PI]
        )
    print(
        f"{len(trajectory)} samples, dt = {dt:.6e} s, duration = {duration:.6e} s, "
        f"n_cav = {n_cav:.6e}, strain = {h:g}"
    )
    for row in rows:
        print(
            f"peak {row[0]}: {row[1]:.6e} Hz (predicted {row[3]:.6e} Hz, "
            f"resolution {row[4]:.6e} Hz)"
        )
    flags = {
        "strain": h,
        "photon_number": n_cav,
        "duration": duration,
        "dt": dt,
        "ep_convention": convention.value,
    }
    _emit(args, cfg, "simulate", flags, columns, rows)
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file (flat dotted keys)")
    common.add_argument("--output", help="output data file; omit for a dry run")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument(
        "--ep-convention",
        choices=[c.value for c in EpConvention],
        default=EpConvention.EQ7.value,
        help="discriminant convention: eq7 (matrix-exact, default) or eq8 "
        "(legacy simplification, EP at half the eq7 photon number)",
    )

    parser = _Parser(prog="epgw", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("ep-locate", parents=[common], help="find the exceptional-point photon number")

    p = sub.add_parser("sweep-ncav", parents=[common], help="eigenvalue branches vs photon number")
    p.add_argument("--min", type=float, default=1e11)
    p.add_argument("--max", type=float, default=5e12)
    p.add_argument("--points", type=int, default=500)
    p.add_argument("--log", action="store_true", help="log-spaced grid")

    p = sub.add_parser("sweep-strain", parents=[common], help="splitting vs strain at the EP")
    p.add_argument("--min", type=float, default=1e-26)
    p.add_argument("--max", type=float, default=1e-20)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--log", action="store_true", help="log-spaced grid")

    p = sub.add_parser("sensitivity", parents=[common], help="minimum detectable strain vs frequency")
    p.add_argument("--fmin", type=float, default=1e-7)
    p.add_argument("--fmax", type=float, default=1e3)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--tmax", type=float, default=None, help="override sensitivity.t_max_s")
    p.add_argument(
        "--tau-rule",
        choices=["half", "full"],
        default="half",
        help="integration-time cap: half (1/2f, default) or full (1/f) signal period",
    )
    p.add_argument(
        "--overlay",
        action="append",
        help="comparison curve CSV (frequency_hz,strain) to embed; repeatable",
    )

    p = sub.add_parser("simulate", parents=[common], help="time-domain run and spectral readout")
    p.add_argument("--strain", type=float, default=1e-4, help="applied strain h")
    p.add_argument("--photon-number", type=float, default=None, help="override drive photon number")
    p.add_argument("--duration", type=float, default=None, help="simulated time (s)")
    p.add_argument("--dt", type=float, default=None, help="sample step (s)")

    return parser


_COMMANDS = {
    "ep-locate": cmd_ep_locate,
    "sweep-ncav": cmd_sweep_ncav,
    "sweep-strain": cmd_sweep_strain,
    "sensitivity": cmd_sensitivity,
    "simulate": cmd_simulate,
}


def main(argv=None) -> int:
    """Entry point. Exit codes: 0 success, 1 config/usage, 2 domain, 3 I/O."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        overrides = {}
        if getattr(args, "tmax", None) is not None:
            overrides["sensitivity.t_max_s"] = args.tmax
        cfg = parse_config(args.config, overrides)
        return _COMMANDS[args.command](cfg, args)
    except (
        _UsageError,
        ConfigParseError,
        UnknownKeyError,
        NonPositiveParameterError,
        ValidationError,
        InvalidRangeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        NoEPError,
        ZeroCouplingError,
        NotAtEPError,
        SamplingTooCoarseError,
        TooFewSamplesError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
