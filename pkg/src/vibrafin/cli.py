"""Command-line front door for the toolkit.

Subcommands: modal, sweep, thrust, calibrate, optimize, simulate, report,
serve.  Exit codes: 0 success, 1 validation/usage error, 2 numerical
failure.  All outputs are deterministic for a given config; CSV always
uses '.' decimals and LF line endings.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .config import (
    ToolkitConfig,
    apply_parameters,
    bundled_parameters,
    default_config,
    load_config,
    load_parameters,
    save_parameters,
)
from .errors import NumericalError, ValidationError
from .fin_optimizer import design_report, optimize_fin_length, optimize_rod_length
from .locomotion import simulate, summarize, trajectory_to_csv
from .scenarios import load_scenario
from .structural_modal import (
    build_reduced_model,
    modal_sweep,
    natural_frequencies,
    sweep_to_csv,
)
from .thrust_model import thrust_chain

__all__ = ["main", "run"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibrafin",
        description="vibration-driven fin propulsion design and simulation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"vibrafin {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(p):
        p.add_argument("--config", help="toolkit config JSON (default: built-in)")
        p.add_argument("--params", help="calibrated parameters file (default: shipped calibration)")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "text"), default=None,
                       help="output format where applicable")

    p = sub.add_parser("modal", help="print mount mode frequencies and axes")
    add_common(p)

    p = sub.add_parser("sweep", help="modal sweep over a geometry axis, CSV output")
    add_common(p)
    p.add_argument("--axis", required=True,
                   choices=("rod-length", "aspect-ratio", "fin-length"))
    p.add_argument("--from", dest="start", required=True, help="grid start (e.g. 6mm or 1.0)")
    p.add_argument("--to", dest="stop", required=True, help="grid end")
    p.add_argument("--steps", type=int, required=True, help="number of grid points")

    p = sub.add_parser("thrust", help="thrust vs voltage table, CSV output")
    add_common(p)
    p.add_argument("--steps", type=int, default=11, help="number of voltage points")

    p = sub.add_parser("calibrate", help="fit coefficients to the bundled datasets")
    add_common(p)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--restarts", type=int, default=2)

    p = sub.add_parser("optimize", help="rod-length or fin-length optimization")
    add_common(p)
    p.add_argument("--target", required=True, choices=("rod-length", "fin-length"))
    p.add_argument("--lo", required=True, help="lower bound (e.g. 6mm)")
    p.add_argument("--hi", required=True, help="upper bound (e.g. 18mm)")
    p.add_argument("--voltage", type=float, default=None,
                   help="drive voltage for fin-length optimization (default: rated)")
    p.add_argument("--target-freq", type=float, default=None,
                   help="target frequency in Hz for rod-length optimization "
                        "(default: rated drive frequency)")

    p = sub.add_parser("simulate", help="run a scenario file, write trajectory CSV + summary")
    add_common(p)
    p.add_argument("--scenario", required=True, help="scenario file or bundled name")
    p.add_argument("--summary-out", help="write the summary to this file")
    p.add_argument("--decimation", type=int, default=10,
                   help="sample every N ticks in the CSV (default 10)")

    p = sub.add_parser("report", help="design report for the configured geometry")
    add_common(p)

    p = sub.add_parser("serve", help="start the interactive simulation server")
    add_common(p)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--snapshot-rate", type=float, default=30.0)
    p.add_argument("--replay-file", default="vibrafin_replay.jsonl")

    return parser


def _parse_length(text: str) -> float:
    """Parse '6mm', '0.2m', '200um' or a bare number (meters) to meters."""
    s = text.strip().lower()
    for suffix, scale in (("mm", 1e-3), ("um", 1e-6), ("m", 1.0)):
        if s.endswith(suffix):
            return float(s[: -len(suffix)]) * scale
    return float(s)


def _load_toolkit(args) -> ToolkitConfig:
    config = load_config(args.config) if args.config else default_config()
    if args.params:
        params = load_parameters(args.params)
    else:
        params = bundled_parameters()
    return apply_parameters(config, params)


def _emit(text: str, args) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_modal(args) -> int:
    cfg = _load_toolkit(args)
    model = build_reduced_model(cfg.rigid, cfg.fin, cfg.fluid, cfg.model)
    freqs = natural_frequencies(model)
    lines = [
        f"f1_hz: {freqs.f1:.4f} (axis {freqs.axis1})",
        f"f2_hz: {freqs.f2:.4f} (axis {freqs.axis2})",
        f"gap_ratio: {(freqs.f2 - freqs.f1) / freqs.f1:.6f}",
    ]
    _emit("\n".join(lines) + "\n", args)
    return 0


_AXIS_NAMES = {"rod-length": "rod_length", "aspect-ratio": "aspect_ratio",
               "fin-length": "fin_length"}


def _cmd_sweep(args) -> int:
    cfg = _load_toolkit(args)
    axis = _AXIS_NAMES[args.axis]
    if args.steps < 1:
        raise ValidationError("steps must be >= 1")
    if axis == "aspect_ratio":
        start, stop = float(args.start), float(args.stop)
    else:
        start, stop = _parse_length(args.start), _parse_length(args.stop)
    if args.steps == 1:
        values = [start]
    else:
        values = [start + (stop - start) * i / (args.steps - 1) for i in range(args.steps)]
    rows = modal_sweep({axis: values}, cfg.rigid, cfg.fin, cfg.fluid, cfg.model)
    _emit(sweep_to_csv(rows), args)
    return 0


def _cmd_thrust(args) -> int:
    cfg = _load_toolkit(args)
    lo, hi = cfg.motor.voltage_range
    n = max(args.steps, 2)
    lines = ["voltage_v,freq_hz,a_x1_m,a_x2_m,a_x3_m,u_mps,thrust_n"]
    for i in range(n):
        v = lo + (hi - lo) * i / (n - 1)
        c = thrust_chain(v, cfg.rigid, cfg.fin, cfg.fluid, cfg.motor,
                         cfg.coefficients, cfg.model)
        lines.append(
            ",".join(f"{x:.9g}" for x in
                     (c.voltage_v, c.freq_hz, c.a_x1_m, c.a_x2_m, c.a_x3_m,
                      c.u_mps, c.thrust_n))
        )
    _emit("\n".join(lines) + "\n", args)
    return 0


def _cmd_calibrate(args) -> int:
    from .calibrate import run_calibration

    config = load_config(args.config) if args.config else default_config()
    params, fit = run_calibration(config, max_iter=args.max_iter,
                                  restarts=args.restarts)
    out = args.out or "calibrated.params.json"
    records = [
        {"dataset": e.dataset, "index": e.index, "error": e.error}
        for e in fit.per_record_errors
    ]
    save_parameters(params, out, objective=fit.objective, records=records,
                    notes="staged fit against the bundled reference datasets")
    worst = max(abs(e.error) for e in fit.per_record_errors)
    sys.stdout.write(f"wrote {out}\n")
    sys.stdout.write(f"locomotion objective {fit.objective:.3e}, "
                     f"worst record error {worst * 100:.1f}%\n")
    return 0


def _cmd_optimize(args) -> int:
    cfg = _load_toolkit(args)
    lo, hi = _parse_length(args.lo), _parse_length(args.hi)
    if args.target == "rod-length":
        from .erm_motor import drive_frequency

        target = args.target_freq or drive_frequency(cfg.motor, cfg.motor.rated_voltage)
        result = optimize_rod_length((lo, hi), cfg.rigid, cfg.fin, cfg.fluid,
                                     target, cfg.model)
        text = (
            f"rod_length_mm: {result.rod_length * 1e3:.4f}\n"
            f"f1_hz: {result.f1:.3f}\n"
            f"mismatch: {result.mismatch:.3e}\n"
            f"method: {result.method}\n"
            f"at_boundary: {str(result.at_boundary).lower()}\n"
        )
    else:
        voltage = args.voltage or cfg.motor.rated_voltage
        result = optimize_fin_length((lo, hi), voltage, cfg.rigid, cfg.fin,
                                     cfg.fluid, cfg.motor, cfg.coefficients,
                                     cfg.model)
        text = (
            f"fin_length_mm: {result.fin_length * 1e3:.4f}\n"
            f"thrust_n: {result.thrust:.6e}\n"
        )
    _emit(text, args)
    return 0


def _summary_text(summary, body_length: float) -> str:
    radius_bl = (summary.turning_radius / body_length
                 if math.isfinite(summary.turning_radius) else math.inf)
    # speed/|yaw| as a consistency diagnostic next to the circle-fit radius
    yaw = abs(summary.steady_yaw_rate)
    kin_radius = summary.steady_speed / yaw if yaw > 1e-3 else math.inf
    return (
        f"steady_speed_mps: {summary.steady_speed:.6f}\n"
        f"steady_speed_bl_s: {summary.steady_speed / body_length:.4f}\n"
        f"steady_yaw_rate_radps: {summary.steady_yaw_rate:.6f}\n"
        f"turning_radius_m: {summary.turning_radius:.6f}\n"
        f"turning_radius_bl: {radius_bl:.4f}\n"
        f"kinematic_radius_m: {kin_radius:.6f}\n"
        f"time_to_steady_s: {summary.time_to_steady:.3f}\n"
    )


def _cmd_simulate(args) -> int:
    cfg = _load_toolkit(args)
    scenario = load_scenario(args.scenario)
    traj = simulate(scenario, cfg.body, decimation=args.decimation)
    _emit(trajectory_to_csv(traj), args)
    summary = summarize(traj)
    text = _summary_text(summary, cfg.body.body_length)
    if args.summary_out:
        with open(args.summary_out, "w") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return 0


def _cmd_report(args) -> int:
    cfg = _load_toolkit(args)
    report = design_report(cfg.rigid, cfg.fin, cfg.fluid, cfg.motor,
                           cfg.coefficients, cfg.model)
    if args.format == "csv":
        fields = [f for f in report.__dataclass_fields__ if f != "mode_axis"]
        lines = [",".join(fields + ["mode_axis"])]
        lines.append(",".join([f"{getattr(report, f):.9g}" for f in fields]
                              + [report.mode_axis]))
        _emit("\n".join(lines) + "\n", args)
    else:
        _emit(report.render_text(), args)
    return 0


def _cmd_serve(args) -> int:
    from .sim_server import SimServer

    cfg = _load_toolkit(args)
    server = SimServer(cfg, host=args.host, port=args.port,
                       snapshot_rate=args.snapshot_rate,
                       replay_path=args.replay_file)
    port = server.start_background()
    sys.stdout.write(f"vibrafin sim server on ws://{args.host}:{port}\n")
    sys.stdout.flush()
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()
    return 0


_COMMANDS = {
    "modal": _cmd_modal,
    "sweep": _cmd_sweep,
    "thrust": _cmd_thrust,
    "calibrate": _cmd_calibrate,
    "optimize": _cmd_optimize,
    "simulate": _cmd_simulate,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; normalize to 1 per the contract
        return 0 if exc.code == 0 else 1
    if not args.command:
        parser.print_help()
        return 1
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
