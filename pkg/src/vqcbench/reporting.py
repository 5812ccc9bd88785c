"""Structured-text report files, plot-ready figure data, checkpoints.

Reports are sectioned text: `[section]` headers, `key = value` lines in
[meta], CSV rows elsewhere.  Floats are written with repr() so that
parse(write(report)) reproduces the report exactly.
"""

from __future__ import annotations

import os

import numpy as np

from .circuit import CircuitSpec
from .errors import DataError
from .pipeline import (EvalError, EvalReport, Record, RunRecord, SweepPoint,
                       SweepResult)

REPORT_HEADER = "# vqcbench benchmark report v1"
SWEEP_HEADER = "# vqcbench sweep report v1"
CHECKPOINT_HEADER = "# vqcbench circuit checkpoint v1"

RECORD_COLUMNS = "class_a,class_b,model,seed,accuracy,wall_time_s"
RUN_COLUMNS = "class_a,class_b,model,seed,epochs_run,best_epoch,best_val_accuracy,loss_trace"


def _f(x: float) -> str:
    return repr(float(x))


def _trace(values) -> str:
    return ";".join(_f(v) for v in values)


def _parse_trace(text: str) -> list:
    return [float(v) for v in text.split(";")] if text else []


# ---------------------------------------------------------------------------
# Benchmark report
# ---------------------------------------------------------------------------

def write_report(report: EvalReport, path) -> None:
    lines = [REPORT_HEADER, "[meta]"]
    for key, value in report.meta.items():
        lines.append(f"{key} = {value}")
    lines.append("[records]")
    lines.append(RECORD_COLUMNS)
    for r in report.records:
        lines.append(f"{r.class_a},{r.class_b},{r.model},{r.seed},{_f(r.accuracy)},{_f(r.wall_time)}")
    lines.append("[training_runs]")
    lines.append(RUN_COLUMNS)
    for r in report.training_runs:
        lines.append(
            f"{r.class_a},{r.class_b},{r.model},{r.seed},{r.epochs_run},"
            f"{r.best_epoch},{_f(r.best_val_accuracy)},{_trace(r.loss_trace)}"
        )
    lines.append("[per_class]")
    lines.append("model,class,mean,ci_half")
    for model, classes in report.per_class.items():
        for cls, (mean, half) in classes.items():
            lines.append(f"{model},{cls},{_f(mean)},{_f(half)}")
    lines.append("[macro]")
    lines.append("model,mean,mean_ci_half")
    for model, (mean, half) in report.macro.items():
        lines.append(f"{model},{_f(mean)},{_f(half)}")
    lines.append("[errors]")
    lines.append("class_a,class_b,model,seed,message")
    for e in report.errors:
        lines.append(f"{e.class_a},{e.class_b},{e.model},{e.seed},{e.message}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _split_sections(lines, expected_header, path):
    if not lines or lines[0] != expected_header:
        raise DataError(f"{path}: not a recognised report (missing {expected_header!r})")
    sections: dict = {}
    current = None
    for line in lines[1:]:
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is not None and line:
            sections[current].append(line)
    return sections


def parse_report(path) -> EvalReport:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    sections = _split_sections(lines, REPORT_HEADER, path)
    meta = {}
    for line in sections.get("meta", []):
        key, _, value = line.partition(" = ")
        meta[key] = value
    records = []
    for line in sections.get("records", [])[1:]:
        a, b, model, seed, acc, wt = line.split(",")
        records.append(Record(a, b, model, int(seed), float(acc), float(wt)))
    runs = []
    for line in sections.get("training_runs", [])[1:]:
        a, b, model, seed, epochs, best, vacc, trace = line.split(",")
        runs.append(RunRecord(a, b, model, int(seed), int(epochs), int(best),
                              float(vacc), _parse_trace(trace)))
    per_class: dict = {}
    for line in sections.get("per_class", [])[1:]:
        model, cls, mean, half = line.split(",")
        per_class.setdefault(model, {})[cls] = (float(mean), float(half))
    macro: dict = {}
    for line in sections.get("macro", [])[1:]:
        model, mean, half = line.split(",")
        macro[model] = (float(mean), float(half))
    errors = []
    for line in sections.get("errors", [])[1:]:
        a, b, model, seed, message = line.split(",", 4)
        errors.append(EvalError(a, b, model, int(seed), message))
    return EvalReport(meta=meta, records=records, training_runs=runs,
                      per_class=per_class, macro=macro, errors=errors)


# ---------------------------------------------------------------------------
# Sweep report
# ---------------------------------------------------------------------------

def write_sweep(sweep: SweepResult, path) -> None:
    lines = [SWEEP_HEADER, "[meta]"]
    for key, value in sweep.meta.items():
        lines.append(f"{key} = {value}")
    lines.append("[sweep]")
    lines.append("n_qubits,param_count,mean_accuracy,ci_half,n_pairs")
    for p in sweep.points:
        lines.append(f"{p.n_qubits},{p.param_count},{_f(p.mean_accuracy)},{_f(p.ci_half)},{p.n_pairs}")
    lines.append("[pair_means]")
    lines.append("n_qubits,class_a,class_b,mean_accuracy")
    for n_q, means in sweep.pair_means.items():
        for (a, b), value in means.items():
            lines.append(f"{n_q},{a},{b},{_f(value)}")
    lines.append("[records]")
    lines.append("n_qubits," + RECORD_COLUMNS)
    for n_q, r in sweep.records:
        lines.append(f"{n_q},{r.class_a},{r.class_b},{r.model},{r.seed},{_f(r.accuracy)},{_f(r.wall_time)}")
    lines.append("[errors]")
    lines.append("n_qubits,class_a,class_b,model,seed,message")
    for n_q, e in sweep.errors:
        lines.append(f"{n_q},{e.class_a},{e.class_b},{e.model},{e.seed},{e.message}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_sweep(path) -> SweepResult:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    sections = _split_sections(lines, SWEEP_HEADER, path)
    meta = {}
    for line in sections.get("meta", []):
        key, _, value = line.partition(" = ")
        meta[key] = value
    points = []
    for line in sections.get("sweep", [])[1:]:
        n_q, pc, mean, half, n_pairs = line.split(",")
        points.append(SweepPoint(int(n_q), int(pc), float(mean), float(half), int(n_pairs)))
    pair_means: dict = {}
    for line in sections.get("pair_means", [])[1:]:
        n_q, a, b, value = line.split(",")
        pair_means.setdefault(int(n_q), {})[(a, b)] = float(value)
    records = []
    for line in sections.get("records", [])[1:]:
        n_q, a, b, model, seed, acc, wt = line.split(",")
        records.append((int(n_q), Record(a, b, model, int(seed), float(acc), float(wt))))
    errors = []
    for line in sections.get("errors", [])[1:]:
        n_q, a, b, model, seed, message = line.split(",", 5)
        errors.append((int(n_q), EvalError(a, b, model, int(seed), message)))
    return SweepResult(meta=meta, points=points, pair_means=pair_means,
                       records=records, errors=errors)


# ---------------------------------------------------------------------------
# Figure data (plot-ready CSV next to the report)
# ---------------------------------------------------------------------------

def write_per_class_csv(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("model,class,mean,ci_half\n")
        for model, classes in report.per_class.items():
            for cls, (mean, half) in classes.items():
                fh.write(f"{model},{cls},{_f(mean)},{_f(half)}\n")


def write_sweep_csv(sweep: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("n_qubits,param_count,mean_accuracy,ci_half,n_pairs\n")
        for p in sweep.points:
            fh.write(f"{p.n_qubits},{p.param_count},{_f(p.mean_accuracy)},{_f(p.ci_half)},{p.n_pairs}\n")


# ---------------------------------------------------------------------------
# Circuit checkpoints (flat parameter array + architecture header)
# ---------------------------------------------------------------------------

def checkpoint_filename(class_a: str, class_b: str, seed: int) -> str:
    return f"checkpoint_{class_a}_vs_{class_b}_seed{seed}.txt"


def write_checkpoint(path, spec: CircuitSpec, params: np.ndarray,
                     head_w: np.ndarray | None = None, head_b: float | None = None) -> None:
    lines = [CHECKPOINT_HEADER, "[circuit]",
             f"n_qubits = {spec.n_qubits}",
             f"n_blocks = {spec.n_blocks}",
             f"input_dim = {spec.input_dim}"]
    if head_w is not None:
        lines.append("[head]")
        lines.append("w = " + ",".join(_f(v) for v in np.asarray(head_w)))
        lines.append(f"b = {_f(head_b if head_b is not None else 0.0)}")
    lines.append("[params]")
    lines.extend(_f(v) for v in np.asarray(params, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_checkpoint(path):
    """Returns (spec, params, head_w or None, head_b or None)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    sections = _split_sections(lines, CHECKPOINT_HEADER, path)
    circuit_kv = {}
    for line in sections.get("circuit", []):
        key, _, value = line.partition(" = ")
        circuit_kv[key] = int(value)
    try:
        spec = CircuitSpec(n_qubits=circuit_kv["n_qubits"],
                           n_blocks=circuit_kv["n_blocks"],
                           input_dim=circuit_kv["input_dim"])
    except KeyError as exc:
        raise DataError(f"{path}: checkpoint missing circuit field {exc}") from None
    params = np.array([float(v) for v in sections.get("params", [])])
    head_w = head_b = None
    for line in sections.get("head", []):
        key, _, value = line.partition(" = ")
        if key == "w":
            head_w = np.array([float(v) for v in value.split(",")])
        elif key == "b":
            head_b = float(value)
    from .circuit import param_count
    if params.size != param_count(spec):
        raise DataError(
            f"{path}: checkpoint has {params.size} parameters, "
            f"spec needs {param_count(spec)}"
        )
    return spec, params, head_w, head_b


def ensure_outdir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
