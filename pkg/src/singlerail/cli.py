"""Command-line entry point: ``singlerail <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

from . import acceptance, experiment, fock, gates
from .experiment import ConfigError, ExperimentConfig


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"efficiency must lie in [0, 1], got {value}")
    return value


def _positive_int(minimum: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def _chi(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(value) or value == 0.0:
        raise argparse.ArgumentTypeError(f"chi must be finite and nonzero, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chi", type=_chi, help=f"coherent amplitude (default {experiment.DEFAULT_CHI})")
    common.add_argument("--efficiency", type=_unit_interval, help="detector efficiency in [0, 1]")
    common.add_argument("--points", type=_positive_int(2), help="number of phase samples")
    common.add_argument("--cutoff", type=_positive_int(1), help="photon-number cutoff")
    common.add_argument("--resources", choices=experiment.RESOURCE_POLICIES, help="superposition resources")
    common.add_argument("--config", help="JSON file with ExperimentConfig fields")
    common.add_argument("--out", help="CSV output path (sweep)")

    parser = argparse.ArgumentParser(prog="singlerail", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    sub.add_parser("cs-table", parents=[common], help="controlled-sign truth table with herald probabilities")
    sub.add_parser("sp", parents=[common], help="superposition producer working point")
    sub.add_parser("measure-demo", parents=[common], help="superposition measurement outcome distribution")
    sub.add_parser("sweep", parents=[common], help="phase sweep of the fringe test circuit")
    sub.add_parser("verify", parents=[common], help="run the reference acceptance checks")
    return parser


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    changes = {}
    for flag, name in (
        ("chi", "chi"),
        ("efficiency", "efficiency"),
        ("points", "phase_points"),
        ("cutoff", "cutoff"),
        ("resources", "resource_policy"),
        ("out", "output_path"),
    ):
        value = getattr(args, flag)
        if value is not None:
            changes[name] = value
    return cfg.replace(**changes) if changes else cfg


def _fmt(z: complex) -> str:
    return f"{z.real:+.10f}" if abs(z.imag) < 1e-14 else f"{z.real:+.10f}{z.imag:+.10f}j"


def cmd_cs_table(cfg: ExperimentConfig) -> None:
    eff = cfg.efficiency
    print(f"controlled-sign gate, detector efficiency {eff}")
    print("input  output_amplitude  herald_probability")
    for occ in ((0, 0), (0, 1), (1, 0), (1, 1)):
        res = gates.cs_gate(fock.make_basis_state(occ), efficiency=eff, resolution=cfg.resolution)
        if res.is_pure:
            amp = _fmt(res.state[occ]) if res.ensemble.branches else "0"
        else:
            amp = f"mixture of {len(res.ensemble)} branches"
        print(f"|{occ[0]}{occ[1]}>   {amp:>16}  {res.herald_probability:.12f}")


def cmd_sp(cfg: ExperimentConfig) -> None:
    wp = gates.working_point(cfg.chi, cfg.cutoff)
    print(f"chi = {wp.chi}")
    print(f"reflectivity = {wp.eta:.10f}")
    print(f"herald_probability = {wp.herald_probability:.10f}")
    if cfg.efficiency != 1.0:
        lossy = gates.superposition_producer(cfg.chi, cfg.efficiency, cfg.cutoff, cfg.resolution)
        print(f"herald_probability_at_efficiency_{cfg.efficiency} = {lossy.herald_probability:.10f}")
    print(f"component_weight_0 = {wp.component_weight:.10f}")
    print(f"ratio_2_to_1_fock = {wp.second_order_ratio:.10f}")
    print(f"ratio_2_to_1_creation_coefficient = {wp.second_order_coefficient_ratio:.10f}")
    norm = math.sqrt(wp.herald_probability)
    for n, a in enumerate(wp.amplitudes):
        if abs(a) > 1e-12:
            print(f"amplitude_{n} = {_fmt(a / norm)}")


def cmd_measure_demo(cfg: ExperimentConfig, resources: str) -> None:
    if resources == "producer":
        resource = gates.superposition_producer(cfg.chi, 1.0, cfg.cutoff).normalized_state()
        label = f"producer state at chi={cfg.chi}"
    else:
        resource, label = None, "exact (|0>+|1>)/sqrt2"
    print(f"superposition measurement, resource {label}, detector efficiency {cfg.efficiency}")
    print("input  P(plus)  P(minus)  P(inconclusive)")
    cut = cfg.cutoff
    for name, state in (
        ("|+>", gates.plus_state(cut)),
        ("|->", gates.minus_state(cut)),
        ("|0>", fock.make_basis_state((0,), cut)),
        ("|1>", fock.make_basis_state((1,), cut)),
    ):
        r = gates.superposition_measurement(state, resource, cfg.efficiency, cfg.resolution)
        print(f"{name}    {r.plus:.10f}  {r.minus:.10f}  {r.inconclusive:.10f}")


def cmd_sweep(cfg: ExperimentConfig) -> None:
    result = experiment.run_phase_sweep(cfg, write=True)
    print(f"wrote {cfg.output_path} ({cfg.phase_points} points) and {experiment.metadata_path(cfg.output_path)}")
    print(f"visibility = {result.visibility:.6f}")


def cmd_verify(cfg: ExperimentConfig) -> int:
    results = acceptance.run_all(print)
    print(acceptance.resolution_report())
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
    except ConfigError as exc:
        parser.error(str(exc))
    try:
        if args.command == "cs-table":
            cmd_cs_table(cfg)
        elif args.command == "sp":
            cmd_sp(cfg)
        elif args.command == "measure-demo":
            # exact resource unless asked for explicitly
            cmd_measure_demo(cfg, args.resources or "exact")
        elif args.command == "sweep":
            cmd_sweep(cfg)
        elif args.command == "verify":
            return cmd_verify(cfg)
    except (OSError, ValueError) as exc:
        print(f"singlerail: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
