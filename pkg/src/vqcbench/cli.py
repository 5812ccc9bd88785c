"""Command-line entry points.

Subcommands: synth, benchmark, sweep, selfcheck, kernel-dump.  A config
file in `key = value` form can preset any benchmark/sweep option; flags
given on the command line take precedence.  Exit codes: 0 success,
1 selfcheck failures, 2 configuration error, 3 data error, 4 internal
failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import figures, kernels, pipeline, reporting
from .datasets import STRUCTURES, read_feature_file, synth_dataset, write_feature_file
from .errors import ConfigError, DataError
from .pipeline import MODELS, BenchmarkConfig, full_split, scaled_split

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

CONFIG_KEYS = {
    "data", "out", "models", "seeds", "pca_components", "batch_size",
    "desk_fraction", "workers", "n_qubits", "qubits", "save_checkpoints",
}


def _read_config_file(path) -> dict:
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _parse_models(text: str) -> tuple:
    models = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in models if m not in MODELS]
    if bad:
        raise ConfigError(f"unknown model(s) {bad}; choose from {MODELS}")
    return models


def _parse_int_list(text: str, what: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{what} must be a comma-separated integer list") from None


def _merge(args, filecfg: dict, key: str, cast, default):
    """CLI flag > config file > default."""
    cli_value = getattr(args, key, None)
    if cli_value is not None:
        return cli_value
    if key in filecfg:
        return cast(filecfg[key])
    return default


def _build_config(args, filecfg) -> BenchmarkConfig:
    models = _merge(args, filecfg, "models", _parse_models, pipeline.MODELS)
    if isinstance(models, str):
        models = _parse_models(models)
    seeds = _merge(args, filecfg, "seeds", lambda s: _parse_int_list(s, "seeds"),
                   (0, 1, 2, 3, 4))
    if isinstance(seeds, str):
        seeds = _parse_int_list(seeds, "seeds")
    pca = int(_merge(args, filecfg, "pca_components", int, 16))
    batch = int(_merge(args, filecfg, "batch_size", int, 64))
    if batch not in (32, 64):
        raise ConfigError("batch_size must be 32 or 64")
    fraction = float(_merge(args, filecfg, "desk_fraction", float, 1.0))
    if not 0.0 < fraction <= 1.0:
        raise ConfigError("desk_fraction must be in (0, 1]")
    workers = int(_merge(args, filecfg, "workers", int, 1))
    n_qubits = int(_merge(args, filecfg, "n_qubits", int, 4))
    keep = bool(_merge(args, filecfg, "save_checkpoints",
                       lambda v: v.lower() in ("1", "true", "yes"), False))
    try:
        split = full_split() if fraction >= 1.0 else scaled_split(fraction)
        return BenchmarkConfig(
            models=tuple(models), seeds=tuple(seeds), pca_components=pca,
            split=split, n_qubits=n_qubits, batch_size=batch, workers=workers,
            keep_checkpoints=keep,
        )
    except DataError as exc:
        raise ConfigError(str(exc)) from None


def _load_dataset(args):
    if getattr(args, "data", None):
        return read_feature_file(args.data)
    if getattr(args, "synth", None):
        return synth_dataset(args.synth, args.classes, args.per_class,
                             args.raw_dim, args.synth_seed)
    raise ConfigError("provide --data FILE or --synth STRUCTURE")


def _add_dataset_flags(p):
    p.add_argument("--data", help="feature file (class,<f0>,<f1>,... rows)")
    p.add_argument("--synth", choices=STRUCTURES,
                   help="generate the dataset in-process instead of reading --data")
    p.add_argument("--classes", type=int, default=10, help="synthetic class count")
    p.add_argument("--per-class", type=int, default=200, dest="per_class")
    p.add_argument("--raw-dim", type=int, default=64, dest="raw_dim")
    p.add_argument("--synth-seed", type=int, default=0, dest="synth_seed")


def _add_run_flags(p):
    p.add_argument("--config", help="key = value config file (CLI flags win)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--models", help=f"comma list from {','.join(MODELS)}")
    p.add_argument("--seeds", help="comma list of training seeds (default 0..4)")
    p.add_argument("--pca-components", type=int, dest="pca_components")
    p.add_argument("--batch-size", type=int, dest="batch_size", choices=(32, 64))
    p.add_argument("--desk-fraction", type=float, dest="desk_fraction",
                   help="scale the 1400/300/300 split by this fraction")
    p.add_argument("--workers", type=int, help="parallel pair workers")
    p.add_argument("--n-qubits", type=int, dest="n_qubits")
    p.add_argument("--save-checkpoints", action="store_const", const=True,
                   default=None, dest="save_checkpoints")
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering (delimited outputs only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqcbench",
        description="Quantum-feature-map classification benchmark toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write a synthetic feature file")
    p_synth.add_argument("--out", required=True, help="output feature file")
    p_synth.add_argument("--structure", required=True, choices=STRUCTURES)
    p_synth.add_argument("--classes", type=int, default=2)
    p_synth.add_argument("--per-class", type=int, default=200, dest="per_class")
    p_synth.add_argument("--raw-dim", type=int, default=64, dest="raw_dim")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--separation", type=float, default=6.0,
                         help="blob center separation in noise units")
    p_synth.add_argument("--noise", type=float, default=None,
                         help="structure noise scale (generator-specific default)")

    p_bench = sub.add_parser("benchmark", help="run the one-vs-one benchmark")
    _add_dataset_flags(p_bench)
    _add_run_flags(p_bench)

    p_sweep = sub.add_parser("sweep", help="qubit-count sweep (PCA-32)")
    _add_dataset_flags(p_sweep)
    _add_run_flags(p_sweep)
    p_sweep.add_argument("--qubits", help="comma list of qubit counts (default 1..7)")

    sub.add_parser("selfcheck", help="run the fast invariant battery")

    p_dump = sub.add_parser("kernel-dump", help="write a Gram matrix as binary")
    _add_dataset_flags(p_dump)
    p_dump.add_argument("--class-a", required=True, dest="class_a")
    p_dump.add_argument("--class-b", required=True, dest="class_b")
    p_dump.add_argument("--kind", choices=kernels.KERNEL_KINDS, default="fidelity")
    p_dump.add_argument("--set", choices=("train", "test"), default="train",
                        dest="which", help="train self-kernel or test-vs-train")
    p_dump.add_argument("--checkpoint", help="trained circuit checkpoint (fidelity)")
    p_dump.add_argument("--params-seed", type=int, default=0, dest="params_seed",
                        help="random circuit parameters when no checkpoint is given")
    p_dump.add_argument("--pca-components", type=int, default=16, dest="pca_components")
    p_dump.add_argument("--desk-fraction", type=float, default=1.0, dest="desk_fraction")
    p_dump.add_argument("--n-qubits", type=int, default=4, dest="n_qubits")
    p_dump.add_argument("--out", required=True, help="output .gram file")
    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_synth(args) -> int:
    dataset = synth_dataset(args.structure, args.classes, args.per_class,
                            args.raw_dim, args.seed, separation=args.separation,
                            noise=args.noise)
    write_feature_file(args.out, dataset)
    print(f"wrote {len(dataset.labels)} samples, {dataset.n_classes} classes -> {args.out}")
    return EXIT_OK


def _outdir(args) -> str:
    out = getattr(args, "out", None) or "."
    return reporting.ensure_outdir(out)


def cmd_benchmark(args) -> int:
    filecfg = _read_config_file(args.config) if args.config else {}
    config = _build_config(args, filecfg)
    dataset = _load_dataset(args)
    report = pipeline.run_benchmark(dataset, config)
    out = _outdir(args)
    report_path = os.path.join(out, "benchmark_report.txt")
    reporting.write_report(report, report_path)
    reporting.write_per_class_csv(report, os.path.join(out, "per_class_means.csv"))
    written = [report_path, os.path.join(out, "per_class_means.csv")]
    if config.keep_checkpoints:
        for cp in report.checkpoints:
            path = os.path.join(out, reporting.checkpoint_filename(cp.class_a, cp.class_b, cp.seed))
            reporting.write_checkpoint(path, cp.spec, cp.params, cp.head_w, cp.head_b)
            written.append(path)
    if not args.no_figures:
        written.extend(figures.render_benchmark_figures(report, out))
    for model, (mean, half) in report.macro.items():
        print(f"macro {model}: {100 * mean:.2f}% (+- {100 * half:.2f} mean per-class CI)")
    if report.errors:
        print(f"{len(report.errors)} task(s) failed; see [errors] in the report")
    print("wrote: " + ", ".join(os.path.relpath(p, out) for p in written))
    return EXIT_OK


def cmd_sweep(args) -> int:
    filecfg = _read_config_file(args.config) if args.config else {}
    if getattr(args, "pca_components", None) is None and "pca_components" not in filecfg:
        args.pca_components = 32  # sweep default: richer classical input
    config = _build_config(args, filecfg)
    qubits = _parse_int_list(args.qubits, "qubits") if args.qubits else (1, 2, 3, 4, 5, 6, 7)
    dataset = _load_dataset(args)
    sweep = pipeline.qubit_sweep(dataset, config, qubits)
    out = _outdir(args)
    sweep_path = os.path.join(out, "sweep_report.txt")
    reporting.write_sweep(sweep, sweep_path)
    reporting.write_sweep_csv(sweep, os.path.join(out, "sweep_curve.csv"))
    written = [sweep_path, os.path.join(out, "sweep_curve.csv")]
    if not args.no_figures:
        written.append(figures.render_sweep_figure(sweep, out))
    for p in sweep.points:
        print(f"n_q={p.n_qubits} ({p.param_count} params): "
              f"{100 * p.mean_accuracy:.2f}% +- {100 * p.ci_half:.2f} over {p.n_pairs} pairs")
    print("wrote: " + ", ".join(os.path.relpath(p, out) for p in written))
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck
    results = run_selfcheck()
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
        failures += 0 if r.passed else 1
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_CHECK_FAILED
    print("all checks passed")
    return EXIT_OK


def cmd_kernel_dump(args) -> int:
    dataset = _load_dataset(args)
    try:
        a = dataset.class_names.index(args.class_a)
        b = dataset.class_names.index(args.class_b)
    except ValueError as exc:
        raise DataError(f"unknown class name: {exc}") from None
    fraction = args.desk_fraction
    split = full_split() if fraction >= 1.0 else scaled_split(fraction)
    task = pipeline.make_pair_task(dataset, a, b, split, args.pca_components)
    left = task.train_x if args.which == "train" else task.test_x
    right = None if args.which == "train" else task.train_x
    if args.kind == "fidelity":
        if args.checkpoint:
            spec, params, _, _ = reporting.read_checkpoint(args.checkpoint)
            if spec.input_dim != args.pca_components:
                raise DataError(
                    f"checkpoint expects {spec.input_dim} features, "
                    f"PCA gives {args.pca_components}"
                )
        else:
            from .circuit import CircuitSpec, param_count
            spec = CircuitSpec(n_qubits=args.n_qubits, input_dim=args.pca_components)
            rng = np.random.default_rng(args.params_seed)
            params = rng.uniform(-1.0, 1.0, param_count(spec))
        km = kernels.gram(spec, params, left, right)
    elif args.kind == "linear":
        km = kernels.linear_gram(left, right)
    else:
        gamma = kernels.gamma_scale(task.train_x)
        km = kernels.rbf_gram(left, right, gamma=gamma)
    kernels.dump_gram(km, args.out)
    print(f"wrote {km.values.shape[0]}x{km.values.shape[1]} {km.kind} Gram -> {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "synth": cmd_synth,
        "benchmark": cmd_benchmark,
        "sweep": cmd_sweep,
        "selfcheck": cmd_selfcheck,
        "kernel-dump": cmd_kernel_dump,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
