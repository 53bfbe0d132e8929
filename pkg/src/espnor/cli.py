"""Command-line entry point: ``espnor {run,zne,oracle,transpile,compare,gen}``.

Exit codes: 0 success, 1 a pipeline stage failed, 2 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .circuit import load_circuit, save_circuit
from .config import ConfigError, NoiseSpec, ZneConfig, load_config
from .model_io import InstanceParseError, InstanceValidationError, generate_synthetic_instance, load_instance, save_instance
from .pipeline import (
    StageError,
    compare_reports,
    dumps_report,
    oracle_report,
    prepare_pipeline,
    run_report,
    with_overrides,
)
from .transpile import compile_to_native, gate_count_report

EXIT_OK, EXIT_STAGE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


def _parse_noise(text: str | None) -> NoiseSpec | None:
    if text is None:
        return None
    if text == "default":
        return NoiseSpec()
    if text in ("none", "zero", "0"):
        return NoiseSpec(0.0, 0.0)
    try:
        p1, p2 = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError("config", f"--noise expects 'p1,p2', 'default' or 'none', got {text!r}") from exc
    return NoiseSpec(p1, p2)


def _load_inputs(args):
    try:
        config = load_config(args.config)
        config = with_overrides(config, seed=args.seed, shots=args.shots, noise=_parse_noise(args.noise))
    except ConfigError as exc:
        raise InputError("config", str(exc)) from exc
    try:
        instance = load_instance(args.instance)
    except (InstanceParseError, InstanceValidationError, OSError, ValueError) as exc:
        raise InputError("load", str(exc)) from exc
    return instance, config


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        for row in rows:
            wr.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])


def _emit(report: dict, sidecars: dict, out: str | None) -> None:
    text = dumps_report(report)
    if out is None:
        sys.stdout.write(text)
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / "report.json").write_text(text, encoding="utf-8")
    for name, rows in sidecars.items():
        _write_csv(d / name, rows)


def cmd_run(args) -> int:
    instance, config = _load_inputs(args)
    if args.zne and config.zne is None:
        config = replace(config, zne=ZneConfig(rng_seed=config.rng_seed))
    report, sidecars = run_report(instance, config)
    _emit(report, sidecars, args.out)
    return EXIT_OK


def cmd_zne(args) -> int:
    instance, config = _load_inputs(args)
    if config.noise is None:
        raise InputError("config", "zne needs a noise model (config 'noise' or --noise)")
    if config.zne is None:
        config = replace(config, zne=ZneConfig(rng_seed=config.rng_seed))
    report, sidecars = run_report(instance, config)
    _emit(report, sidecars, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        instance = load_instance(args.instance)
    except (InstanceParseError, InstanceValidationError, OSError, ValueError) as exc:
        raise InputError("load", str(exc)) from exc
    try:
        report = oracle_report(instance)
    except (ValueError, ArithmeticError) as exc:
        raise StageError("oracle", str(exc)) from exc
    _emit(report, {}, args.out)
    return EXIT_OK


def cmd_transpile(args) -> int:
    if (args.circuit is None) == (args.instance is None):
        raise InputError("config", "give exactly one of --circuit or --instance")
    if args.circuit is not None:
        try:
            circuit = load_circuit(args.circuit)
        except (OSError, ValueError) as exc:
            raise InputError("load", str(exc)) from exc
        try:
            native = compile_to_native(circuit)
        except ValueError as exc:
            raise StageError("transpile", str(exc)) from exc
    else:
        instance, config = _load_inputs(args)
        prep = prepare_pipeline(instance, config)
        circuit, native = prep.circuit, prep.native
    summary = {"logical": gate_count_report(circuit), "native": gate_count_report(native)}
    if args.out is not None:
        save_circuit(native, args.out)
    sys.stdout.write(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        a = json.loads(Path(args.report_a).read_text(encoding="utf-8"))
        b = json.loads(Path(args.report_b).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError("load", str(exc)) from exc
    try:
        out = compare_reports(a, b)
    except (ValueError, KeyError) as exc:
        raise InputError("compare", str(exc)) from exc
    _emit(out, {}, args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        inst = generate_synthetic_instance(args.n_ao, args.n_act, args.seed, eri_scale=args.eri_scale)
    except ValueError as exc:
        raise InputError("config", str(exc)) from exc
    if args.out is None:
        sys.stdout.write(inst.dumps())
    else:
        save_instance(inst, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="espnor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def pipeline_flags(p, *, instance_required=True):
        p.add_argument("--instance", required=instance_required, help="problem instance (JSON)")
        p.add_argument("--config", help="run configuration (JSON); defaults apply when omitted")
        p.add_argument("--seed", type=int, help="override the configured RNG seed")
        p.add_argument("--shots", type=int, help="override the configured shot count")
        p.add_argument("--noise", help="'p1,p2', 'default' (3e-4,1.5e-2) or 'none'")

    p = sub.add_parser("run", help="VQE, measurement and electrostatics estimate")
    pipeline_flags(p)
    p.add_argument("--zne", action="store_true", help="add a zero-noise extrapolation block")
    p.add_argument("--out", help="output directory for report.json and CSV sidecars")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("zne", help="run plus zero-noise extrapolation")
    pipeline_flags(p)
    p.add_argument("--zne", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_zne)

    p = sub.add_parser("oracle", help="exact (FCI) electrostatics by every route")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("transpile", help="compile a circuit to RX/RZ/RXX and count gates")
    pipeline_flags(p, instance_required=False)
    p.add_argument("--circuit", help="circuit file to compile")
    p.add_argument("--out", help="write the native circuit here")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("compare", help="difference of two reports, E(B) - E(A)")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen", help="write a synthetic problem instance")
    p.add_argument("--n-ao", type=int, default=4)
    p.add_argument("--n-act", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eri-scale", type=float, default=0.06)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"espnor: input error in stage '{exc.stage}': {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StageError as exc:
        print(f"espnor: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
