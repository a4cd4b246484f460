"""Command-line interface.

Subcommands
-----------
cool-dynamics        pump pulse on the thermal system, time traces
pump-sweep           steady state of both models over a pump-rate grid
rabi-oscillation     coherent tone on the pre-cooled ensemble, dynamics
rabi-splitting       steady response versus drive detuning, per power
mode-detuning-sweep  photon number as the mode crosses both transitions
oracle-check         compare the moment closure against the exact solver
params               inspect resolved parameter presets

Exit codes: 0 success, 1 configuration problem, 2 numerical or
physical-regime failure, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from ._version import __version__
from .config import (RunConfig, apply_assignments, canonical_text,
                     parse_config)
from .errors import (ConfigError, DomainError, NonConvergenceError,
                     NumericalFailureError)
from .params import PRESET_NAMES, preset
from . import experiments, lindblad, output

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nvcool",
        description="Microwave-mode cooling and cavity QED with "
                    "optically pumped spin ensembles")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
            ("cool-dynamics", "time traces for a pump pulse"),
            ("pump-sweep", "steady states over a pump-rate grid"),
            ("rabi-oscillation", "photon dynamics under a coherent tone"),
            ("rabi-splitting", "steady response versus drive detuning"),
            ("mode-detuning-sweep",
             "photon number across both spin transitions")):
        p = sub.add_parser(name, help=helptext)
        _add_run_options(p)
        p.set_defaults(handler=_run_experiment, experiment=name)

    p = sub.add_parser("oracle-check",
                       help="gate the moment closure against the exact "
                            "density-matrix solver")
    p.add_argument("--quick", action="store_true",
                   help="smaller cutoffs and shorter evolutions")
    p.add_argument("--gate", action="append", default=None,
                   metavar="NAME", help="run only the named fixture "
                   "(repeatable)")
    p.set_defaults(handler=_run_oracle_check)

    p = sub.add_parser("params", help="inspect parameter presets")
    psub = p.add_subparsers(dest="params_command", required=True)
    show = psub.add_parser("show", help="print a resolved parameter set")
    show.add_argument("preset", choices=PRESET_NAMES)
    show.add_argument("--set", action="append", default=[], metavar="K=V",
                      help="override entries as in run configs")
    show.add_argument("--heating", action="store_true",
                      help="apply laser heating at --power")
    show.add_argument("--power", type=float, default=2.0, metavar="W")
    show.set_defaults(handler=_params_show)
    listing = psub.add_parser("list", help="list preset names")
    listing.set_defaults(handler=_params_list)
    return parser


def _add_run_options(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH",
                   help="configuration file (sectioned key = value)")
    p.add_argument("--set", action="append", default=[], metavar="K=V",
                   dest="assignments",
                   help="override one option, e.g. schedule.laser_power="
                        "'1 W' (repeatable)")
    p.add_argument("--csv", metavar="PATH", help="main table destination")
    p.add_argument("--json", metavar="PATH",
                   help="full result envelope destination")
    p.add_argument("--output-dir", metavar="DIR",
                   help="directory for default output names")
    p.add_argument("--label", metavar="TEXT",
                   help="tag appended to default output names")


def _load_config(args) -> RunConfig:
    if args.config:
        with open(args.config) as handle:
            config = parse_config(handle.read(), source=args.config)
    else:
        config = RunConfig()
    config.experiment = args.experiment
    if args.assignments:
        config = apply_assignments(config, args.assignments)
    if args.output_dir:
        config.output_dir = args.output_dir
    if args.label:
        config.label = args.label
    if args.csv:
        config.csv = args.csv
    if args.json:
        config.json = args.json
    return config


def _default_path(config: RunConfig, extension: str) -> str:
    stem = config.experiment + (f"-{config.label}" if config.label else "")
    return os.path.join(config.output_dir, stem + "." + extension)


_RUNNERS = {
    "cool-dynamics": experiments.run_cooling_pulse,
    "pump-sweep": experiments.run_pump_sweep,
    "rabi-oscillation": experiments.run_rabi_oscillation,
    "rabi-splitting": experiments.run_rabi_splitting,
    "mode-detuning-sweep": experiments.run_mode_detuning_sweep,
}


def _trajectory_columns(result) -> dict:
    traj = result.trajectory
    columns = {"t_s": traj.times}
    for level in range(7):
        columns[f"pop{level + 1}"] = traj.populations[:, level]
    columns["photon_n"] = traj.photon_n
    columns["T_eff_K"] = traj.mode_temperature()
    if traj.kind == "driven":
        columns["a_mean_re"] = traj.states[:, 12]
        columns["a_mean_im"] = traj.states[:, 13]
    companion = result.companion
    if companion is not None and companion.times.size == traj.times.size \
            and np.allclose(companion.times, traj.times):
        columns["photon_n_rate"] = companion.photon_n
        columns["T_eff_K_rate"] = companion.mode_temperature()
    return columns


def _run_experiment(args) -> int:
    config = _load_config(args)
    spec = config.to_spec()
    started = time.perf_counter()
    result = _RUNNERS[config.experiment](spec)
    wall = time.perf_counter() - started

    if hasattr(result, "trajectory"):
        tables = {"main": output.make_table(_trajectory_columns(result))}
        xi = result.xi
    else:
        tables = {"main": output.make_table(result.columns)}
        xi = result.summary.get("xi_rad_s")
    envelope = output.build_envelope(
        config.experiment, canonical_text(config), result.params, xi,
        tables, result.summary, warnings=result.warnings,
        label=config.label)
    envelope.wall_time_s = wall

    csv_path = config.csv or _default_path(config, "csv")
    json_path = config.json or _default_path(config, "json")
    output.write_csv(envelope, csv_path)
    output.write_json(envelope, json_path)

    print(f"{config.experiment}: done in {wall:.2f} s")
    for key in sorted(result.summary):
        value = result.summary[key]
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            print(f"  {key} = {value:.6g}")
    for warning in result.warnings:
        print(f"  warning: {warning}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def _run_oracle_check(args) -> int:
    results = lindblad.run_oracle_suite(names=args.gate, quick=args.quick)
    failed = 0
    for gate in results:
        print(gate.summary())
        if not gate.passed:
            failed += 1
    if failed:
        print(f"{failed} of {len(results)} oracle gates FAILED")
        return 2
    print(f"all {len(results)} oracle gates passed")
    return 0


def _params_show(args) -> int:
    from .experiments import ExperimentSpec, resolve

    overrides = {}
    if args.set:
        base = apply_assignments(RunConfig(), args.set)
        overrides = base.overrides
    spec = ExperimentSpec(preset_name=args.preset, overrides=overrides,
                          heating=args.heating, laser_power=args.power)
    params, xi, notes = resolve(spec)
    plain = output.params_to_dict(preset(args.preset))
    resolved = output.params_to_dict(params, xi)

    heated_fields = {"rates.k31", "rates.k13", "rates.k21", "rates.k12",
                     "resonator.omega31", "resonator.omega21"} \
        if args.heating else set()
    print(f"preset: {args.preset}")
    width = max(len(k) for k in resolved)
    for key in sorted(resolved):
        value = resolved[key]
        if key in overrides:
            source = "override"
        elif key in heated_fields:
            source = "heated"
        elif key.startswith("derived."):
            source = "derived"
        elif key in plain and plain[key] != value:
            source = "derived"
        else:
            source = "preset"
        text = f"{value:.9g}" if isinstance(value, float) else str(value)
        print(f"  {key:<{width}}  {text:>16}  {source}")
    for note in notes:
        print(f"  note: {note}")
    return 0


def _params_list(args) -> int:
    for name in PRESET_NAMES:
        print(name)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (DomainError, NumericalFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
