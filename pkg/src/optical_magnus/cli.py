"""Command-line front end: ``optical-magnus <subcommand> [options]``.

Exit codes: 0 ok, 1 selfcheck failure, 2 invalid input, 3 numerical failure.
Angles are radians. SI inputs of the ``shake`` command take explicit unit
suffixes (``0.8um``, ``20uK``, ``88u``, ``2G``, ``7kHz``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields as dc_fields

import numpy as np

from . import __version__
from .checks import run_checks
from .deflection import (
    NoRoot,
    SCAN_COLUMNS,
    deflection_analytic,
    deflection_numeric,
    equilibrium_displacement,
    radiant_profile,
    scan,
)
from .dynamics import (
    CONSTANTS,
    DriveSpec,
    StepTooLarge,
    TrapSpec,
    adiabaticity_check,
    max_step,
    resonant_escape_estimate,
    simulate,
    trap_frequency,
)
from .fields import IncidentBeam
from .focal import FitFailed, axial_flux, focal_map, spot_metrics, spot_radius_estimate
from .quadrature import MAX_NODES, MIN_NODES, NoConvergence
from .radiometry import DegenerateBeam, beam_power

EXIT_OK, EXIT_SELFCHECK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- units

_UNITS = {
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "temperature_energy": {"J": 1.0, "K": CONSTANTS["k_B"], "mK": 1e-3 * CONSTANTS["k_B"],
                           "uK": 1e-6 * CONSTANTS["k_B"], "nK": 1e-9 * CONSTANTS["k_B"]},
    "mass": {"kg": 1.0, "u": CONSTANTS["u"], "amu": CONSTANTS["u"]},
    "field": {"T": 1.0, "mT": 1e-3, "G": CONSTANTS["gauss"], "mG": 1e-3 * CONSTANTS["gauss"]},
    "angular_rate": {"rad/s": 1.0, "Hz": 2 * math.pi, "kHz": 2e3 * math.pi, "MHz": 2e6 * math.pi},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6},
}
_DEFAULT_UNIT = {"length": "m", "temperature_energy": "J", "mass": "kg", "field": "T",
                 "angular_rate": "rad/s", "time": "s"}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]*)\s*$")


def parse_quantity(text, kind: str) -> float:
    """Convert ``"20uK"`` style input to SI; bare numbers are taken as SI already."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _QUANTITY.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse {kind} quantity {text!r}")
    value, unit = float(m.group(1)), m.group(2) or _DEFAULT_UNIT[kind]
    table = _UNITS[kind]
    if unit not in table:
        raise ConfigError(f"unknown {kind} unit {unit!r}; expected one of {sorted(table)}")
    return value * table[unit]


# --------------------------------------------------------------- config

@dataclass
class RunConfig:
    shape: str = "gauss"
    width: float = 0.1
    detuning: float = 1.0
    sigma: int = 1
    kd: float = 0.0
    grid: int = MAX_NODES
    rel_tol: float = 1e-12
    format: str = "json"
    out: str | None = None
    # scan / profile / focal
    axis: str = "detuning"
    start: float = -5.0
    stop: float = 5.0
    points: int = 21
    theta_max: float = math.pi / 2
    # shake
    wavelength: str = "0.8um"
    waist: str = "2um"
    depth: str = "20uK"
    mass: str = "88u"
    omega_b: str = "resonant"
    mj: int = 1
    b_field: str = "2G"
    dt: str | None = None
    t_max: str | None = None
    potential: str = "gaussian"

    def validate(self) -> None:
        if self.shape not in ("gauss", "tophat"):
            raise ConfigError(f"shape must be 'gauss' or 'tophat', got {self.shape!r}")
        if not 0 < self.width < math.pi / 2:
            raise ConfigError(f"width must lie in (0, pi/2) rad, got {self.width}")
        if self.sigma not in (1, -1):
            raise ConfigError(f"sigma must be +1 or -1, got {self.sigma}")
        if self.grid < MIN_NODES:
            raise ConfigError(f"grid must be at least {MIN_NODES} nodes per axis, got {self.grid}")
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.axis not in ("detuning", "displacement", "theta"):
            raise ConfigError(f"axis must be detuning, displacement or theta, got {self.axis!r}")
        if self.points < 2:
            raise ConfigError("points must be at least 2")
        if not 0 < self.theta_max <= math.pi:
            raise ConfigError("theta_max must lie in (0, pi]")
        if self.mj not in (-1, 0, 1):
            raise ConfigError(f"mj must be -1, 0 or 1, got {self.mj}")
        if self.potential not in ("gaussian", "harmonic"):
            raise ConfigError(f"potential must be gaussian or harmonic, got {self.potential!r}")

    def beam(self) -> IncidentBeam:
        if self.shape == "gauss":
            return IncidentBeam.gaussian(self.width)
        return IncidentBeam.tophat(self.width)

    def trap(self) -> TrapSpec:
        return TrapSpec(
            wavelength=parse_quantity(self.wavelength, "length"),
            waist=parse_quantity(self.waist, "length"),
            depth=parse_quantity(self.depth, "temperature_energy"),
            mass=parse_quantity(self.mass, "mass"),
        )

    def drive(self, trap: TrapSpec) -> DriveSpec:
        if str(self.omega_b).strip() == "resonant":
            omega_b = trap_frequency(trap)
        else:
            omega_b = parse_quantity(self.omega_b, "angular_rate")
        return DriveSpec(omega_b=omega_b, m_j=self.mj, b_field=parse_quantity(self.b_field, "field"))


_CONFIG_FIELDS = {f.name: f for f in dc_fields(RunConfig)}


def _coerce(name, value):
    kind = _CONFIG_FIELDS[name].type
    if value is None:
        return None
    try:
        if kind == "float":
            return float(value)
        if kind == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: cannot interpret {value!r} as {kind}") from None
    return str(value)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the ``--config`` file, then command-line overrides."""
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a flat JSON object")
        unknown = sorted(set(loaded) - set(_CONFIG_FIELDS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for k, v in loaded.items():
            if isinstance(v, (dict, list)):
                raise ConfigError(f"config key {k!r} must hold a scalar")
            values[k] = _coerce(k, v)
    for name in _CONFIG_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = _coerce(name, v)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# --------------------------------------------------------------- output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def render(columns: list[str], rows: list[list], meta: dict, fmt: str) -> str:
    """Serialize a table; the CSV and JSON forms carry identical numbers."""
    if fmt == "json":
        doc = {
            "meta": meta,
            "columns": columns,
            "rows": [[_jsonable(v) for v in row] for row in rows],
        }
        return json.dumps(doc, indent=1, allow_nan=True) + "\n"
    buf = io.StringIO()
    for key in sorted(meta):
        value = meta[key]
        buf.write(f"# {key}={'' if value is None else value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_table(text: str, fmt: str) -> tuple[list[str], list[list[float | None]]]:
    """Parse output of :func:`render` back into header and float rows."""
    if fmt == "json":
        doc = json.loads(text)
        return doc["columns"], [[None if v is None else float(v) for v in r] for r in doc["rows"]]
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [[None if v == "" else float(v) for v in r] for r in reader]


def _meta(cfg: RunConfig, command: str) -> dict:
    """Version plus the full resolved config; the output path is left out so
    the bytes do not depend on where they are written."""
    meta = {"version": __version__, "command": command}
    meta.update({f"config.{k}": v for k, v in asdict(cfg).items() if k != "out"})
    return meta


_DYN_KEYS = ("wavelength", "waist", "depth", "mass", "omega_b", "mj", "b_field", "dt", "t_max",
             "potential")


# ------------------------------------------------------------- commands

def cmd_deflect(cfg: RunConfig) -> int:
    beam = cfg.beam()
    num = deflection_numeric(beam, cfg.detuning, cfg.sigma, cfg.kd, cfg.rel_tol, cfg.grid)
    an = deflection_analytic(beam, cfg.detuning, cfg.sigma, cfg.kd)
    columns = [
        "delta_theta_analytic [rad]", "force_x_analytic [P/c]", "delta_k_z_analytic [k]",
        "delta_theta_numeric [rad]", "force_x_numeric [P/c]",
        "delta_k_x [k]", "delta_k_y [k]", "delta_k_z [k]",
        "scattered_ratio [E_sc/E_0]", "energy_residual [P]", "achieved_tol [1]",
    ]
    row = [
        an.delta_theta, an.force_x, an.delta_k[2],
        num.delta_theta, num.force_x, *num.delta_k,
        num.scattered_amplitude / beam.amplitude, num.energy_residual, num.achieved_tol,
    ]
    emit(render(columns, [row], _meta(cfg, "deflect"), cfg.format), cfg.out)
    return EXIT_OK


_SCAN_UNITS = {
    "detuning": "gamma", "kd": "1/k", "sigma": "1",
    "delta_theta_analytic": "rad", "force_x_analytic": "P/c",
    "delta_theta_numeric": "rad", "force_x_numeric": "P/c",
    "delta_k_x": "k", "delta_k_y": "k", "delta_k_z": "k",
    "scattered_ratio": "E_sc/E_0", "energy_residual": "P", "achieved_tol": "1",
}


def cmd_scan(cfg: RunConfig) -> int:
    if cfg.axis == "theta":
        return cmd_profile(cfg, "scan")
    table = scan(
        cfg.beam(), cfg.axis, cfg.start, cfg.stop, cfg.points,
        sigma=cfg.sigma, detuning=cfg.detuning, kd=cfg.kd,
        rel_tol=cfg.rel_tol, max_nodes=cfg.grid,
    )
    columns = [f"{c} [{_SCAN_UNITS[c]}]" for c in SCAN_COLUMNS]
    rows = np.column_stack([table[c] for c in SCAN_COLUMNS]).tolist()
    emit(render(columns, rows, _meta(cfg, "scan"), cfg.format), cfg.out)
    return EXIT_OK


def cmd_equilibrium(cfg: RunConfig) -> int:
    beam = cfg.beam()
    kd_num = equilibrium_displacement(
        beam, cfg.detuning, cfg.sigma, rel_tol=cfg.rel_tol, max_nodes=cfg.grid
    )
    kd_an = equilibrium_displacement(beam, cfg.detuning, cfg.sigma, method="analytic")
    columns = ["kd_numeric [1/k]", "kd_analytic [1/k]"]
    emit(render(columns, [[kd_num, kd_an]], _meta(cfg, "equilibrium"), cfg.format), cfg.out)
    return EXIT_OK


def cmd_profile(cfg: RunConfig, command: str = "profile") -> int:
    prof = radiant_profile(
        cfg.beam(), cfg.detuning, cfg.sigma, n_theta=max(cfg.points, 16),
        theta_max=cfg.theta_max, kd=cfg.kd, rel_tol=cfg.rel_tol, max_nodes=cfg.grid,
    )
    names = ["theta", "j_in", "j_sc", "j_if", "j_total"]
    columns = ["theta [rad]"] + [f"{n} [J_in(0)]" for n in names[1:]]
    rows = np.column_stack([prof[n] for n in names]).tolist()
    emit(render(columns, rows, _meta(cfg, command), cfg.format), cfg.out)
    return EXIT_OK


def cmd_focal(cfg: RunConfig) -> int:
    beam = cfg.beam()
    fmap = focal_map(beam)
    metrics = spot_metrics(fmap)
    columns = ["spot_radius [1/k]", "paraxial_radius [1/k]", "peak_ratio [1]", "fit_residual [peak]"]
    row = [metrics.radius, spot_radius_estimate(beam), metrics.peak_ratio, metrics.residual]
    if cfg.shape == "gauss":
        columns.append("flux_ratio [(2pi)^2 P]")
        row.append(axial_flux(beam) / (4 * math.pi**2 * beam_power(beam).numeric))
    emit(render(columns, [row], _meta(cfg, "focal"), cfg.format), cfg.out)
    return EXIT_OK


def cmd_shake(cfg: RunConfig) -> int:
    trap = cfg.trap()
    drive = cfg.drive(trap)
    omega = trap_frequency(trap)
    dt = parse_quantity(cfg.dt, "time") if cfg.dt is not None else max_step(trap, drive) / 2
    if cfg.t_max is not None:
        t_max = parse_quantity(cfg.t_max, "time")
    else:
        t_max = 10 * 2 * math.pi / drive.omega_b
    traj = simulate(trap, drive, dt, t_max, potential=cfg.potential)
    n_est, v_est = resonant_escape_estimate(trap)
    summary = {
        "version": __version__,
        "config": {k: getattr(cfg, k) for k in _DYN_KEYS},
        "trap_frequency_hz": omega / (2 * math.pi),
        "omega_b_rad_s": drive.omega_b,
        "dt_s": dt,
        "t_max_s": t_max,
        "n_cycles_estimate": n_est,
        "exit_speed_estimate_m_s": v_est,
        "n_cycles_simulated": traj.drive_cycles(drive.omega_b),
        "escape_time_s": traj.escape_time,
        "exit_speed_simulated_m_s": abs(float(traj.velocities[-1])) if traj.escape_time else None,
        "escape_criterion": traj.criterion or "energy > U0 or |x| > 3 w0 (not met)",
        "max_energy_over_depth": float(np.max(traj.energies)) / trap.depth,
        "adiabaticity_ratio": adiabaticity_check(drive),
    }
    sys.stdout.write(json.dumps(summary, indent=1) + "\n")
    if cfg.out:
        columns = ["t [s]", "x [m]", "v [m/s]", "E [J]"]
        rows = np.column_stack([traj.times, traj.positions, traj.velocities, traj.energies]).tolist()
        emit(render(columns, rows, _meta(cfg, "shake"), cfg.format), cfg.out)
    return EXIT_OK


def cmd_selfcheck(cfg: RunConfig, inject: bool = False) -> int:
    results = run_checks(max_nodes=cfg.grid, flip_scatter_sign=inject)
    width = max(len(r.name) for r in results)
    for r in results:
        sys.stdout.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}\n")
    failed = [r for r in results if not r.passed]
    if failed:
        sys.stderr.write(f"selfcheck failed: {failed[0].name}: {failed[0].detail}\n")
        return EXIT_SELFCHECK
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optical-magnus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file of options; command-line flags win")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--grid", type=int, help="quadrature node cap per axis")
    common.add_argument("--rel-tol", dest="rel_tol", type=float)

    optics = argparse.ArgumentParser(add_help=False)
    optics.add_argument("--shape", choices=("gauss", "tophat"))
    optics.add_argument("--width", type=float, help="w_theta or r_theta [rad]")
    optics.add_argument("--detuning", type=float, help="Delta in units of gamma")
    optics.add_argument("--sigma", type=int, choices=(1, -1))
    optics.add_argument("--kd", type=float, help="displacement along x [1/k]")

    sub.add_parser("deflect", parents=[common, optics], help="deflection angle and force")
    p = sub.add_parser("scan", parents=[common, optics], help="detuning or displacement scan")
    p.add_argument("--axis", choices=("detuning", "displacement", "theta"),
                   help="theta gives the radiant profile in the dipole plane")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--theta-max", dest="theta_max", type=float)
    sub.add_parser("equilibrium", parents=[common, optics], help="zero of the transverse force")
    p = sub.add_parser("profile", parents=[common, optics], help="radiant intensity in the dipole plane")
    p.add_argument("--points", type=int, help="samples per side")
    p.add_argument("--theta-max", dest="theta_max", type=float)
    sub.add_parser("focal", parents=[common, optics], help="focal spot metrics")

    p = sub.add_parser("shake", parents=[common], help="rotating-field trap shaking")
    for flag, help_ in (
        ("--wavelength", "e.g. 0.8um"), ("--waist", "e.g. 2um"), ("--depth", "e.g. 20uK"),
        ("--mass", "e.g. 88u"), ("--omega-b", "rad/s, 7kHz, or 'resonant'"),
        ("--b-field", "e.g. 2G"), ("--dt", "e.g. 1us"), ("--t-max", "e.g. 2ms"),
    ):
        p.add_argument(flag, dest=flag[2:].replace("-", "_"), help=help_)
    p.add_argument("--mj", type=int, choices=(-1, 0, 1))
    p.add_argument("--potential", choices=("gaussian", "harmonic"))

    p = sub.add_parser("selfcheck", parents=[common], help="run the invariant suite")
    p.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "selfcheck":
            return cmd_selfcheck(cfg, inject=args.inject_sign_flip)
        handler = {
            "deflect": cmd_deflect,
            "scan": cmd_scan,
            "equilibrium": cmd_equilibrium,
            "profile": cmd_profile,
            "focal": cmd_focal,
            "shake": cmd_shake,
        }[args.command]
        return handler(cfg)
    except (NoConvergence, NoRoot, DegenerateBeam, StepTooLarge, FitFailed) as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
