"""Acceptance battery: one test per criterion, one printed line each.

Heavy fixtures (the rings / xor-tiles benchmarks, the qubit sweep) are
shared across criteria.  Everything is seeded, so results reproduce
bit-for-bit between runs.  Run with `pytest tests/test_acceptance.py -v -s`
to see the per-criterion lines as they pass.
"""

import os
import time

import numpy as np
import pytest

from vqcbench.circuit import CircuitSpec, embed, param_count
from vqcbench.classifiers import KernelSvm, svm_fit, svm_predict
from vqcbench.datasets import synth_dataset, write_feature_file
from vqcbench.kernels import gram, linear_gram, min_eigenvalue
from vqcbench.pipeline import (BenchmarkConfig, all_pairs, qubit_sweep,
                               run_benchmark, scaled_split)
from vqcbench.simulator import (apply_cnot, apply_h, apply_rotation, apply_x,
                                expect_z, zero_state)
from vqcbench.stats import confidence_interval, t_quantile
from vqcbench.training import LinearHead, gradient, softplus_loss, vqc_scores

from oracles import central_difference, dense_embed, phase_aligned_distance, z_expectation

WORKERS = 2


def report_line(criterion: int, passed: bool, detail: str):
    print(f"[criterion {criterion:>2}] {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {criterion}: {detail}"


# ---------------------------------------------------------------------------
# Shared benchmark fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def rings2_report():
    dataset = synth_dataset("rings", 2, 200, 64, seed=7)
    config = BenchmarkConfig(
        models=("logreg", "svm-linear", "svm-rbf", "vqc", "svm-qk"),
        seeds=(0, 1, 2, 3, 4), split=scaled_split(0.1), workers=WORKERS)
    return run_benchmark(dataset, config)


@pytest.fixture(scope="module")
def xor2_report():
    dataset = synth_dataset("xor-tiles", 2, 200, 64, seed=7)
    config = BenchmarkConfig(models=("vqc", "svm-qk"), seeds=(0, 1, 2, 3, 4),
                             split=scaled_split(0.1), workers=WORKERS)
    return run_benchmark(dataset, config)


@pytest.fixture(scope="module")
def ten_class_dataset():
    return synth_dataset("rings", 10, 150, 64, seed=11)


def model_mean(report, model: str) -> float:
    values = [r.accuracy for r in report.records if r.model == model]
    assert values, f"no records for {model}"
    return float(np.mean(values))


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------

def test_criterion_01_parameter_count_law():
    counts = {n: param_count(CircuitSpec(n_qubits=n, n_blocks=6, input_dim=16))
              for n in range(1, 8)}
    ok = all(counts[n] == 38 * n for n in counts) and counts[4] == 152
    report_line(1, ok, f"38*n_q law over n_q=1..7; n_q=4 -> {counts[4]}")


def test_criterion_02_gradient_fidelity():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    instances = 0
    for n_qubits in (1, 2, 3):
        for _ in range(4):
            spec = CircuitSpec(n_qubits=n_qubits, n_blocks=6, input_dim=6)
            theta = rng.uniform(-0.9, 0.9, param_count(spec))
            head = LinearHead(rng.uniform(-1, 1, n_qubits), float(rng.uniform(-0.5, 0.5)))
            X = rng.uniform(-1, 1, (4, 6))
            y = np.where(rng.random(4) > 0.5, 1.0, -1.0)
            dtheta, dw, db = gradient(spec, theta, head, X, y)
            adjoint = np.concatenate([dtheta, dw, [db]])
            flat = np.concatenate([theta, head.w, [head.b]])
            nt = len(theta)

            def loss_at(v, spec=spec, nq=n_qubits, X=X, y=y, nt=nt):
                h = LinearHead(v[nt:nt + nq], float(v[-1]))
                return softplus_loss(vqc_scores(spec, v[:nt], h, X), y)

            fd = central_difference(loss_at, flat, h=1e-5)
            err = np.abs(fd - adjoint) / np.maximum(np.abs(fd), 1e-8)
            worst = max(worst, float(err.max()))
            instances += 1
    elapsed = time.perf_counter() - start
    report_line(2, worst < 1e-5 and instances >= 10,
                f"{instances} instances, max relative error {worst:.2e}, {elapsed:.1f}s")


def test_criterion_03_simulator_oracle():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    worst_embed = 0.0
    for n_qubits in (1, 2):
        spec = CircuitSpec(n_qubits=n_qubits, n_blocks=6, input_dim=5)
        for _ in range(5):
            params = rng.uniform(-1.5, 1.5, param_count(spec))
            x = rng.uniform(-1, 1, 5)
            ours = embed(spec, params, x).amplitudes
            oracle = dense_embed(n_qubits, 6, 5, params, x)
            worst_embed = max(worst_embed, phase_aligned_distance(ours, oracle))
    worst_z = 0.0
    for n in (1, 2, 3):
        for _ in range(5):
            state = zero_state(n)
            for _ in range(20):
                kind = rng.choice(["h", "x", "rot", "cnot"] if n > 1 else ["h", "x", "rot"])
                q = int(rng.integers(n))
                if kind == "h":
                    apply_h(state, q)
                elif kind == "x":
                    apply_x(state, q)
                elif kind == "rot":
                    apply_rotation(state, str(rng.choice(list("xyz"))), q,
                                   float(rng.uniform(-np.pi, np.pi)))
                else:
                    t = int(rng.integers(n))
                    if t != q:
                        apply_cnot(state, q, t)
            for q in range(n):
                worst_z = max(worst_z, abs(expect_z(state, q)
                                           - z_expectation(state.amplitudes, q, n)))
    elapsed = time.perf_counter() - start
    report_line(3, worst_embed < 1e-12 and worst_z < 1e-12,
                f"embed vs dense {worst_embed:.1e}, expect_z vs oracle {worst_z:.1e}, {elapsed:.1f}s")


def test_criterion_04_kernel_validity():
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    spec = CircuitSpec(n_qubits=4, n_blocks=6, input_dim=16)
    params = rng.uniform(-1, 1, param_count(spec))
    X = rng.uniform(-1, 1, (50, 16))
    g = gram(spec, params, X)
    sym = float(np.max(np.abs(g.values - g.values.T)))
    diag = float(np.max(np.abs(np.diag(g.values) - 1.0)))
    eig = min_eigenvalue(g)
    elapsed = time.perf_counter() - start
    report_line(4, sym < 1e-10 and diag < 1e-10 and eig >= -1e-8,
                f"50x50 fidelity Gram: sym {sym:.1e}, diag {diag:.1e}, "
                f"min eig {eig:.1e}, {elapsed:.1f}s")


def test_criterion_05_svm_correctness():
    start = time.perf_counter()
    # 2-point analytic solution
    X2 = np.array([[-1.0], [1.0]])
    y2 = np.array([-1.0, 1.0])
    model2 = svm_fit(linear_gram(X2), y2, C=1.0)
    analytic_ok = (np.max(np.abs(np.abs(model2.dual_coefficients) - 0.5)) < 1e-6
                   and abs(model2.bias) < 1e-6)
    # precomputed == direct on 5 random tasks, and KKT on each
    rng = np.random.default_rng(5)
    identical = True
    kkt_worst = 0.0
    for _ in range(5):
        X = rng.standard_normal((40, 3))
        y = np.where(X @ rng.standard_normal(3) + 0.3 * rng.standard_normal(40) > 0,
                     1.0, -1.0)
        if len(np.unique(y)) < 2:
            y[0] = -y[0]
        T = rng.standard_normal((20, 3))
        direct = KernelSvm(kind="linear", C=1.0).fit(X, y)
        g = linear_gram(X)
        pre = svm_fit(g, y, C=1.0)
        identical &= bool(np.array_equal(direct.predict(T),
                                         svm_predict(pre, linear_gram(T, X))))
        alpha = np.zeros(len(y))
        alpha[pre.support_indices] = np.abs(pre.dual_coefficients)
        margins = y * (g.values[:, pre.support_indices] @ pre.dual_coefficients + pre.bias)
        for i in range(len(y)):
            if alpha[i] <= 1e-9:
                kkt_worst = max(kkt_worst, 1.0 - margins[i])
            elif alpha[i] >= 1.0 - 1e-9:
                kkt_worst = max(kkt_worst, margins[i] - 1.0)
            else:
                kkt_worst = max(kkt_worst, abs(margins[i] - 1.0))
    elapsed = time.perf_counter() - start
    report_line(5, analytic_ok and identical and kkt_worst < 1e-3 + 1e-9,
                f"analytic alpha/bias ok={analytic_ok}, precomputed==direct over 5 tasks, "
                f"KKT violation {kkt_worst:.1e}, {elapsed:.1f}s")


def test_criterion_06_nonlinearity_separation(rings2_report):
    means = {m: model_mean(rings2_report, m)
             for m in ("logreg", "svm-linear", "svm-rbf", "vqc")}
    ok = (means["logreg"] <= 0.70 and means["svm-linear"] <= 0.70
          and means["vqc"] >= 0.90 and means["svm-rbf"] >= 0.90)
    detail = ", ".join(f"{m}={v:.3f}" for m, v in means.items())
    report_line(6, ok, f"rings (140/30/30, 5 seeds): {detail}")


def test_criterion_07_readout_effect(rings2_report, xor2_report):
    results = {}
    for name, rep in (("rings", rings2_report), ("xor-tiles", xor2_report)):
        vqc = model_mean(rep, "vqc")
        qk = model_mean(rep, "svm-qk")
        results[name] = (vqc, qk, qk >= vqc - 0.005)
    ok = all(flag for _, _, flag in results.values())
    detail = "; ".join(f"{name}: head={vqc:.3f} kernel={qk:.3f}"
                       for name, (vqc, qk, _) in results.items())
    report_line(7, ok, detail)


def test_criterion_08_ci_machinery():
    q4 = t_quantile(0.975, 4)
    q44 = t_quantile(0.975, 44)
    _, const_half = confidence_interval([0.8, 0.8, 0.8, 0.8, 0.8])
    ok = abs(q4 - 2.776) < 1e-3 and abs(q44 - 2.0154) < 1e-3 and const_half == 0.0
    report_line(8, ok, f"t(0.975,4)={q4:.4f}, t(0.975,44)={q44:.4f}, "
                       f"constant half-width={const_half}")


def test_criterion_09_protocol_cardinality(ten_class_dataset):
    start = time.perf_counter()
    config = BenchmarkConfig(models=("logreg", "svm-linear"), seeds=(0, 1, 2, 3, 4),
                             split=scaled_split(0.05), pca_components=16,
                             workers=WORKERS)
    rep = run_benchmark(ten_class_dataset, config)
    pairs = {(r.class_a, r.class_b) for r in rep.records}
    n_pairs_ok = len(pairs) == 45 and len(all_pairs(10)) == 45
    per_class_pairs_ok = True
    for cls in ten_class_dataset.class_names:
        count = sum(1 for p in pairs if cls in p)
        per_class_pairs_ok &= count == 9
    macro_ok = True
    zero_ci_ok = True
    for model in config.models:
        class_means = [v[0] for v in rep.per_class[model].values()]
        macro_ok &= abs(rep.macro[model][0] - np.mean(class_means)) < 1e-12
        zero_ci_ok &= all(v[1] == 0.0 for v in rep.per_class[model].values())
    records_ok = len(rep.records) == 45 * 2 * 5 and not rep.errors
    elapsed = time.perf_counter() - start
    report_line(9, n_pairs_ok and per_class_pairs_ok and macro_ok and zero_ci_ok
                and records_ok,
                f"45 pairs, 9 pairs/class, macro==mean(per-class), zero CI for "
                f"deterministic models, {len(rep.records)} records, {elapsed:.0f}s")


def test_criterion_10_sweep_mechanics(ten_class_dataset):
    start = time.perf_counter()
    config = BenchmarkConfig(models=("vqc",), seeds=(0, 1, 2, 3, 4),
                             split=scaled_split(0.07), pca_components=32,
                             workers=WORKERS)
    sweep = qubit_sweep(ten_class_dataset, config, (1, 2, 3))
    elapsed = time.perf_counter() - start
    by_q = {p.n_qubits: p for p in sweep.points}
    params_ok = all(by_q[n].param_count == 38 * n for n in (1, 2, 3))
    ci_over_pairs_ok = all(p.n_pairs == 45 for p in sweep.points)
    directional_ok = by_q[2].mean_accuracy >= by_q[1].mean_accuracy
    complete_ok = not sweep.errors and all(
        len(sweep.pair_means[n]) == 45 for n in (1, 2, 3))
    detail = ", ".join(f"n{p.n_qubits}={p.mean_accuracy:.4f}+-{p.ci_half:.4f}"
                       for p in sweep.points)
    report_line(10, params_ok and ci_over_pairs_ok and directional_ok and complete_ok,
                f"{detail}; CI over 45 pair means; {elapsed:.0f}s")


def test_criterion_11_full_scale_pathway(ten_class_dataset, tmp_path):
    # The full-scale EuroSAT-MS run is this exact code path at desk scale:
    # a user-supplied feature file, all six models, 45 pairs x 5 seeds.
    start = time.perf_counter()
    from vqcbench.cli import main
    data_path = tmp_path / "user_features.csv"
    write_feature_file(data_path, ten_class_dataset)
    out = tmp_path / "full_run"
    code = main(["benchmark", "--data", str(data_path), "--out", str(out),
                 "--desk-fraction", "0.02", "--workers", str(WORKERS)])
    from vqcbench.reporting import parse_report
    rep = parse_report(out / "benchmark_report.txt")
    records_ok = code == 0 and len(rep.records) == 45 * 6 * 5 and not rep.errors
    csv_lines = (out / "per_class_means.csv").read_text().splitlines()
    layout_ok = (csv_lines[0] == "model,class,mean,ci_half"
                 and len(csv_lines) == 1 + 6 * 10)
    figs = sorted(p for p in os.listdir(out) if p.endswith(".png"))
    figures_ok = {"fig_per_class_discriminative.png", "fig_per_class_svms.png",
                  "fig_per_class_readout.png"} <= set(figs)
    elapsed = time.perf_counter() - start
    report_line(11, records_ok and layout_ok and figures_ok,
                f"six models x 45 pairs x 5 seeds via the CLI, per-class figure "
                f"data + {len(figs)} figures, {elapsed:.0f}s")
