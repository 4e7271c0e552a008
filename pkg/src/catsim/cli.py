"""Command-line front end.

Subcommands: simulate, reduced, compare, theorem-check, reduce-linear.
Exit codes: 0 success, 2 configuration/validation error, 3 failed theorem check.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .checks import run_figure_battery, run_full_battery, run_theorem_battery
from .reduction import (
    IllConditionedFunctionals,
    KernelDimensionMismatch,
    SingularFastBlock,
    conserved_functionals,
    load_block_system,
    reduce_direct,
    reduce_dual,
)
from .scenarios import (
    CompareResult,
    ConfigError,
    ReducedResult,
    Scenario,
    run_compare,
    run_reduced,
    run_simulate,
    scenario_from_dict,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK_FAILED = 3


def _format(value: float) -> str:
    return f"{value:.17g}"


def write_csv(path, header: list[str], columns: list[np.ndarray]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([_format(v) for v in row])


def write_json(path, payload: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    """Apply --override key=value pairs (dotted keys) onto the config document."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--override expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = doc
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--override path {key!r} crosses a non-object")
        node[parts[-1]] = value
    return doc


def load_scenario(args) -> Scenario:
    if args.config is None:
        raise ConfigError("--config is required for this subcommand")
    try:
        doc = json.loads(Path(args.config).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config not found: {args.config}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    doc = apply_overrides(doc, args.override or [])
    base = Path(args.output) if args.output else None
    return scenario_from_dict(doc, base_dir=base)


def _scenario_payload(scenario: Scenario) -> dict:
    return {
        "model": {
            "alpha": scenario.model.alpha, "kappa": scenario.model.kappa,
            "epsilon": scenario.model.epsilon, "n_max": scenario.model.n_max,
            "form": scenario.model.form,
        },
        "integrator": {
            "dt": scenario.integrator.dt, "t_final": scenario.integrator.t_final,
            "scheme": scenario.integrator.scheme,
            "record_stride": scenario.integrator.record_stride,
        },
        "initial_state": scenario.initial_state,
        "reduced_init": scenario.reduced_init,
        "observables": list(scenario.observables),
        "seed": scenario.seed,
    }


def cmd_simulate(args) -> int:
    scenario = load_scenario(args)
    result = run_simulate(scenario)
    traj = result.trajectory
    if scenario.outputs.csv_path:
        header = ["t"] + list(scenario.observables)
        columns = [traj.times] + [traj.observables[name] for name in scenario.observables]
        write_csv(scenario.outputs.csv_path, header, columns)
    if scenario.outputs.json_summary_path:
        write_json(scenario.outputs.json_summary_path,
                   {"scenario": _scenario_payload(scenario), **result.summary})
    return EXIT_OK


def _write_reduced_csv(path, red: ReducedResult):
    write_csv(
        path,
        ["t", "sigma_z_s", "sigma_x_s", "x", "y", "z"],
        [red.times, red.sigma_z, red.sigma_x, red.bloch_x, red.bloch_y, red.bloch_z],
    )


def cmd_reduced(args) -> int:
    scenario = load_scenario(args)
    red = run_reduced(scenario)
    if scenario.outputs.csv_path:
        _write_reduced_csv(scenario.outputs.csv_path, red)
    if scenario.outputs.json_summary_path:
        write_json(scenario.outputs.json_summary_path,
                   {"scenario": _scenario_payload(scenario), **red.summary})
    return EXIT_OK


def _write_compare_outputs(scenario: Scenario, cmp: CompareResult):
    if scenario.outputs.csv_path:
        write_csv(
            scenario.outputs.csv_path,
            ["t", "fidelity", "delta_sigma_z", "delta_sigma_x", "log10_one_minus_F"],
            [cmp.times, cmp.fidelity, cmp.delta_sigma_z, cmp.delta_sigma_x,
             cmp.log10_one_minus_f],
        )
    if scenario.outputs.full_csv_path:
        traj = cmp.full.trajectory
        names = [n for n in scenario.observables if n in traj.observables]
        write_csv(scenario.outputs.full_csv_path, ["t"] + names,
                  [traj.times] + [traj.observables[n] for n in names])
    if scenario.outputs.reduced_csv_path:
        _write_reduced_csv(scenario.outputs.reduced_csv_path, cmp.reduced)
    if scenario.outputs.json_summary_path:
        write_json(scenario.outputs.json_summary_path,
                   {"scenario": _scenario_payload(scenario), **cmp.summary})


def cmd_compare(args) -> int:
    scenario = load_scenario(args)
    cmp = run_compare(scenario)
    _write_compare_outputs(scenario, cmp)
    return EXIT_OK


def cmd_theorem_check(args) -> int:
    params = {}
    if args.config is not None:
        scenario = load_scenario(args)
        params = {
            "n_max": scenario.model.n_max, "alpha": scenario.model.alpha,
            "kappa": scenario.model.kappa, "dt": scenario.integrator.dt,
            "seed": scenario.seed or 610,
        }
        json_path = scenario.outputs.json_summary_path
    else:
        json_path = None
    battery = {"theorems": run_theorem_battery, "figures": lambda **kw: run_figure_battery(
        n_max=kw.get("n_max", 40), alpha=kw.get("alpha", 1.0),
        kappa=kw.get("kappa", 1.0), dt=kw.get("dt", 1e-3)),
        "all": run_full_battery}[args.suite]
    results = battery(**params)
    payload = {
        "suite": args.suite,
        "seed": params.get("seed", 610),
        "all_passed": all(r.passed for r in results),
        "checks": [r.as_dict() for r in results],
    }
    if json_path is None and args.output:
        json_path = Path(args.output) / "theorem_check.json"
    if json_path:
        write_json(json_path, payload)
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}")
    return EXIT_OK if payload["all_passed"] else EXIT_CHECK_FAILED


def cmd_reduce_linear(args) -> int:
    try:
        system = load_block_system(args.matrix_file)
    except FileNotFoundError as exc:
        raise ConfigError(f"matrix file not found: {args.matrix_file}") from exc
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad matrix file: {exc}") from exc
    try:
        direct = reduce_direct(system)
        functionals = conserved_functionals(system.a1, system.a2, system.m)
        dual = reduce_dual(system, functionals)
    except (SingularFastBlock, KernelDimensionMismatch, IllConditionedFunctionals) as exc:
        raise ConfigError(str(exc)) from exc

    residuals = []
    for f in functionals:
        residuals.append(float(np.linalg.norm(
            np.linalg.solve(system.a2.T, system.a1.T @ f.p1) + f.p2)))
    payload = {
        "m": system.m,
        "n": system.n,
        "eps": system.eps,
        "fast_spectral_abscissa": system.fast_abscissa,
        "q_direct": direct.q.tolist(),
        "q_dual": dual.q.tolist(),
        "generator": dual.generator.tolist(),
        "generator_eigenvalues_real": sorted(np.linalg.eigvals(dual.generator).real.tolist()),
        "functional_residuals": residuals,
        "dual_vs_direct_frobenius": float(np.linalg.norm(dual.q - direct.q)),
    }
    if args.output:
        write_json(Path(args.output) / "reduce_linear.json", payload)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catsim",
        description="Two-photon dissipative oscillator: simulation, reduction, checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="scenario JSON path")
        p.add_argument("--output", help="directory prefixed to relative output paths")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="override a config entry (dotted keys, JSON values)")

    for name, fn, descr in (
        ("simulate", cmd_simulate, "integrate the full model and record observables"),
        ("reduced", cmd_reduced, "integrate the 2x2 slow model and the Bloch closed form"),
        ("compare", cmd_compare, "run full and reduced models and compare pointwise"),
    ):
        p = sub.add_parser(name, help=descr)
        add_common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("theorem-check", help="run the verification battery")
    add_common(p)
    p.add_argument("--suite", choices=("theorems", "figures", "all"), default="theorems")
    p.set_defaults(func=cmd_theorem_check)

    p = sub.add_parser("reduce-linear", help="reduce a block system from a matrix file")
    p.add_argument("matrix_file")
    p.add_argument("--output", help="directory for reduce_linear.json (default: stdout)")
    p.set_defaults(func=cmd_reduce_linear)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
