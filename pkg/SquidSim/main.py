"""
SquidSim command line

Each subcommand reads a run configuration, computes its rows and writes CSV (or one
JSON document) to standard output or --out. Diagnostics go to standard error only.
"""
import argparse
import json
import logging
import sys
from functools import partial
from pathlib import Path
from typing import Callable, List, Tuple

from pydantic import ValidationError

from SquidSim.config import Settings, get_settings, load_config
from SquidSim.constants import FLUX_QUANTUM
from SquidSim.exceptions import EXIT_ANALYSIS, EXIT_CONFIG, EXIT_OK, SquidSimError, ZeroVoltageError
from SquidSim.gain_analysis import (
    RENORMALIZED_CONVENTION,
    gain_bandwidth_limit,
    gain_sweep,
    screening_ratio,
    validate_linear_response,
)
from SquidSim.input_circuit import impedance_sweep
from SquidSim.runner import ordered_map
from SquidSim.schemas import (
    GAIN_COLUMNS,
    GAIN_RENORMALIZED_COLUMNS,
    IMPEDANCE_COLUMNS,
    IV_COLUMNS,
    MODES_COLUMNS,
    SCREENING_COLUMNS,
    TRANSFER_COLUMNS,
    VALIDATE_COLUMNS,
    RunConfig,
)
from SquidSim.squid_dynamics import flux_offsets, run_to_steady, transfer_from_points
from SquidSim.transmission_line import modes
from SquidSim.utils import format_row, frequency_grid, json_value, linspace_list

logger = logging.getLogger(__name__)

Table = Tuple[List[str], List[list], List[str]]


def print_success(text):
    """Print success message"""
    print(f"✅ {text}", file=sys.stderr)


def print_error(text):
    """Print error message"""
    print(f"❌ {text}", file=sys.stderr)


def print_info(text):
    """Print info message"""
    print(f"ℹ️  {text}", file=sys.stderr)


# ============== Subcommands ==============

def cmd_modes(cfg: RunConfig, args, map_fn: Callable) -> Table:
    """Mode spectrum of the stripline"""
    rows = [
        [m.index, m.wavenumber, m.frequency, m.inductance, m.capacitance, m.mutual]
        for m in modes(cfg.line, args.count)
    ]
    return MODES_COLUMNS, rows, []


def cmd_impedance(cfg: RunConfig, args, map_fn: Callable) -> Table:
    """Forward impedance over the configured sweep"""
    points = impedance_sweep(cfg.line, cfg.input, frequency_grid(cfg.sweep), args.mode_index)
    rows = [[p.frequency, p.z.real, p.z.imag, abs(p.z), p.warn] for p in points]
    return IMPEDANCE_COLUMNS, rows, []


def cmd_iv(cfg: RunConfig, args, map_fn: Callable) -> Table:
    """Mean voltage against bias current"""
    ic = cfg.squid.critical_current
    jobs = [
        cfg.squid.model_copy(update={"bias_current": ratio * ic})
        for ratio in linspace_list(args.bias_start, args.bias_stop, args.bias_points)
    ]
    points = map_fn(partial(run_to_steady, cfg=cfg.sim), jobs)
    rows = [
        [p.bias_current, p.mean_voltage, p.circulating_current, p.josephson_frequency, p.converged]
        for p in points
    ]
    return IV_COLUMNS, rows, []


def cmd_transfer(cfg: RunConfig, args, map_fn: Callable) -> Table:
    """Bare-SQUID transfer functions over a flux grid"""
    if args.flux_points is None:
        fluxes = [cfg.squid.external_flux]
    else:
        fluxes = [f * FLUX_QUANTUM for f in linspace_list(args.flux_start, args.flux_stop, args.flux_points)]

    jobs = []
    for flux in fluxes:
        centre = cfg.squid.model_copy(update={"external_flux": flux})
        jobs += [centre, *flux_offsets(centre, cfg.sim)]
    points = map_fn(partial(run_to_steady, cfg=cfg.sim), jobs)

    delta = cfg.sim.flux_fd_step * FLUX_QUANTUM
    rows = []
    for k, flux in enumerate(fluxes):
        centre, lower, upper = points[3 * k: 3 * k + 3]
        tf = transfer_from_points(lower, upper, delta)
        rows.append([flux, centre.mean_voltage, centre.circulating_current, tf.v_phi, tf.j_phi])
    return TRANSFER_COLUMNS, rows, []


def cmd_gain(cfg: RunConfig, args, map_fn: Callable) -> Table:
    """Amplifier gain over the configured sweep"""
    points = gain_sweep(
        cfg.squid, cfg.line, cfg.input, cfg.sim, frequency_grid(cfg.sweep),
        renormalized=args.renormalized, map_fn=map_fn,
    )
    columns = list(GAIN_COLUMNS)
    notes = [f"M(omega) clamped to M_1 below omega_1 = {cfg.line.fundamental_frequency:.9g} rad/s"]
    if args.renormalized:
        columns += GAIN_RENORMALIZED_COLUMNS
        notes.append(RENORMALIZED_CONVENTION)

    rows = []
    for p in points:
        row = [
            p.frequency, p.gain.real, p.gain.imag, abs(p.gain), p.z.real, p.z.imag,
            abs(p.z_loaded), p.screening_ratio, p.warn,
        ]
        if args.renormalized:
            g = p.gain_renormalized
            row += [g.real, g.imag, abs(g)]
        rows.append(row)
    return columns, rows, notes


def cmd_screening(cfg: RunConfig, args, map_fn: Callable) -> Table:
    """Suppression of the Josephson-frequency coupling at the bias point"""
    op = run_to_steady(cfg.squid, cfg.sim)
    ratio = screening_ratio(op, cfg.line)
    row = [
        op.bias_current, op.mean_voltage, op.josephson_frequency,
        cfg.line.fundamental_frequency, ratio, gain_bandwidth_limit(cfg.squid),
    ]
    return SCREENING_COLUMNS, [row], []


def cmd_validate(cfg: RunConfig, args, map_fn: Callable) -> Table:
    """Static-transfer gain against the simulated AC response"""
    centre, lower, upper = map_fn(
        partial(run_to_steady, cfg=cfg.sim), [cfg.squid, *flux_offsets(cfg.squid, cfg.sim)]
    )
    if centre.josephson_frequency <= 0:
        raise ZeroVoltageError()
    tf = transfer_from_points(lower, upper, cfg.sim.flux_fd_step * FLUX_QUANTUM)
    omegas = args.omega or [centre.josephson_frequency / 100]
    reports = map_fn(
        partial(
            validate_linear_response, cfg.squid, cfg.line, cfg.input, cfg.sim,
            transfer=tf, operating_point=centre,
        ),
        sorted(omegas),
    )
    rows = [[r.frequency, r.gain_static, r.gain_dynamic, r.deviation] for r in reports]
    return VALIDATE_COLUMNS, rows, []


COMMANDS = {
    "modes": cmd_modes,
    "impedance": cmd_impedance,
    "iv": cmd_iv,
    "transfer": cmd_transfer,
    "gain": cmd_gain,
    "screening": cmd_screening,
    "validate": cmd_validate,
}


# ============== Output ==============

def render_csv(columns: List[str], rows: List[list]) -> str:
    return "\n".join([",".join(columns)] + [format_row(row) for row in rows]) + "\n"


def render_json(command: str, columns: List[str], rows: List[list], notes: List[str]) -> str:
    document = {
        "command": command,
        "columns": columns,
        "rows": [{c: json_value(v) for c, v in zip(columns, row)} for row in rows],
        "notes": notes,
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def run(command: str, cfg: RunConfig, args) -> int:
    """Execute one subcommand and write its data; returns the exit code"""
    try:
        with ordered_map(getattr(args, "threads", None)) as map_fn:
            columns, rows, notes = COMMANDS[command](cfg, args, map_fn)
    except SquidSimError as exc:
        print_error(exc.detail)
        return exc.exit_code
    except ValidationError as exc:
        print_error(str(exc))
        return EXIT_CONFIG

    for note in notes:
        print_info(note)
    if args.json:
        data = render_json(command, columns, rows, notes)
    else:
        data = render_csv(columns, rows)

    if args.out:
        Path(args.out).write_text(data, encoding="utf-8")
        print_success(f"Wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(data)
    return EXIT_OK


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="Path to the key = value run configuration")
    common.add_argument("--json", action="store_true", help="Emit one JSON document instead of CSV")
    common.add_argument("--out", help="Write data to this file instead of standard output")

    parser = argparse.ArgumentParser(
        description="Microstrip-coupled DC SQUID amplifier simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python squidsim.py modes configs/reference.cfg --count 5
  python squidsim.py impedance configs/reference.cfg
  python squidsim.py iv configs/reference.cfg --bias-start 0 --bias-stop 3
  python squidsim.py transfer configs/reference.cfg --flux-start 0 --flux-stop 0.5 --flux-points 9
  python squidsim.py gain configs/reference.cfg --renormalized
  python squidsim.py screening configs/reference.cfg --json
  python squidsim.py validate configs/reference.cfg
        """,
    )
    parser.add_argument("--version", action="version", version=f"{settings.app_name} {settings.app_version}")
    subparsers = parser.add_subparsers(dest="command", required=True, help="Available commands")

    # Modes command
    modes_parser = subparsers.add_parser("modes", parents=[common], help="Stripline mode spectrum")
    modes_parser.add_argument("--count", type=int, default=10, help="Number of modes")

    # Impedance command
    impedance_parser = subparsers.add_parser("impedance", parents=[common], help="Forward impedance sweep")
    impedance_parser.add_argument("--mode-index", type=int, default=1, help="Resonance used for the lumped pair")

    # IV command
    iv_parser = subparsers.add_parser("iv", parents=[common], help="Current-voltage characteristic")
    iv_parser.add_argument("--bias-start", type=float, default=0.0, help="First bias, units of I_c")
    iv_parser.add_argument("--bias-stop", type=float, default=3.0, help="Last bias, units of I_c")
    iv_parser.add_argument("--bias-points", type=int, default=31, help="Number of bias points")

    # Transfer command
    transfer_parser = subparsers.add_parser("transfer", parents=[common], help="V_Phi and J_Phi")
    transfer_parser.add_argument("--flux-start", type=float, default=0.0, help="First flux, units of Phi_0")
    transfer_parser.add_argument("--flux-stop", type=float, default=0.5, help="Last flux, units of Phi_0")
    transfer_parser.add_argument("--flux-points", type=int, default=None, help="Flux grid size (default: configured flux only)")

    # Gain command
    gain_parser = subparsers.add_parser("gain", parents=[common], help="Amplifier gain sweep")
    gain_parser.add_argument("--renormalized", action="store_true", help="Also evaluate with screened L_J")

    # Screening command
    subparsers.add_parser("screening", parents=[common], help="Josephson-frequency coupling suppression")

    # Validate command
    validate_parser = subparsers.add_parser("validate", parents=[common], help="Check the static-transfer assumption")
    validate_parser.add_argument("--omega", type=float, action="append", help="Signal frequency in rad/s (repeatable)")

    return parser


def main(argv=None) -> int:
    """Main CLI entry point"""
    try:
        settings = get_settings()
    except ValidationError as exc:
        print_error(f"Invalid environment settings: {exc}")
        return EXIT_CONFIG

    parser = build_parser(settings)
    args = parser.parse_args(argv)

    logging.basicConfig(
        stream=sys.stderr,
        level=settings.log_level,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = load_config(args.config)
    except SquidSimError as exc:
        print_error(exc.detail)
        return exc.exit_code

    try:
        return run(args.command, cfg, args)
    except Exception as exc:
        print_error(f"{args.command} failed: {exc}")
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
