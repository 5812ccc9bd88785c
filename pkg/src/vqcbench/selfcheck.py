"""Fast invariant battery: gate algebra, gradients, kernel validity,
SVM optimality, and the confidence-interval constants.

Every check runs on small instances (<= 3 qubits) so the whole battery
finishes in seconds.  `corrupt_gradient` is a fault-injection hook for
tests: it perturbs the computed gradient before the comparison so a
broken gradient path is guaranteed to be flagged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import classifiers, kernels, training
from .circuit import CircuitSpec, param_count
from .simulator import QState, apply_cnot, apply_h, apply_rotation, apply_x, zero_state
from .stats import t_quantile
from .training import LinearHead


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_gates() -> CheckResult:
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        state = zero_state(n)
        # randomise, then undo every gate in reverse
        ops = []
        for _ in range(30):
            kind = rng.choice(["h", "x", "rot", "cnot"] if n > 1 else ["h", "x", "rot"])
            q = int(rng.integers(n))
            if kind == "rot":
                axis = str(rng.choice(["x", "y", "z"]))
                angle = float(rng.uniform(-np.pi, np.pi))
                apply_rotation(state, axis, q, angle)
                ops.append(("rot", axis, q, angle))
            elif kind == "cnot":
                t = int(rng.integers(n))
                if t == q:
                    continue
                apply_cnot(state, q, t)
                ops.append(("cnot", q, t))
            elif kind == "h":
                apply_h(state, q)
                ops.append(("h", q))
            else:
                apply_x(state, q)
                ops.append(("x", q))
        norm_err = abs(np.sum(np.abs(state.amplitudes) ** 2) - 1.0)
        for op in reversed(ops):
            if op[0] == "rot":
                apply_rotation(state, op[1], op[2], -op[3])
            elif op[0] == "cnot":
                apply_cnot(state, op[1], op[2])
            elif op[0] == "h":
                apply_h(state, op[1])
            else:
                apply_x(state, op[1])
        expected = zero_state(n)
        worst = max(worst, norm_err,
                    float(np.max(np.abs(state.amplitudes - expected.amplitudes))))
    return CheckResult("gate unitarity / round-trip", worst < 1e-10,
                       f"max deviation {worst:.2e}")


def _check_gradient(corrupt: bool = False) -> CheckResult:
    rng = np.random.default_rng(5)
    spec = CircuitSpec(n_qubits=2, n_blocks=2, input_dim=4)
    theta = rng.uniform(-0.8, 0.8, param_count(spec))
    head = LinearHead(rng.uniform(-1, 1, 2), float(rng.uniform(-0.5, 0.5)))
    X = rng.uniform(-1, 1, (4, 4))
    y = np.array([1.0, -1.0, 1.0, -1.0])
    dtheta, dw, db = training.gradient(spec, theta, head, X, y)
    if corrupt:
        dtheta = dtheta + 1e-2
    flat = np.concatenate([theta, head.w, [head.b]])
    grads = np.concatenate([dtheta, dw, [db]])

    def loss_at(v):
        th, w, b = v[:len(theta)], v[len(theta):len(theta) + 2], v[-1]
        scores = training.vqc_scores(spec, th, LinearHead(w, b), X)
        return training.softplus_loss(scores, y)

    h = 1e-5
    worst = 0.0
    for k in range(flat.size):
        e = np.zeros(flat.size)
        e[k] = h
        fd = (loss_at(flat + e) - loss_at(flat - e)) / (2 * h)
        err = abs(fd - grads[k]) / max(abs(fd), 1e-8)
        worst = max(worst, err)
    return CheckResult("adjoint gradient vs finite differences", worst < 1e-5,
                       f"max relative error {worst:.2e}")


def _check_kernel() -> CheckResult:
    rng = np.random.default_rng(7)
    spec = CircuitSpec(n_qubits=3, n_blocks=6, input_dim=6)
    params = rng.uniform(-1, 1, param_count(spec))
    X = rng.uniform(-1, 1, (30, 6))
    g = kernels.gram(spec, params, X)
    sym = float(np.max(np.abs(g.values - g.values.T)))
    diag = float(np.max(np.abs(np.diag(g.values) - 1.0)))
    min_eig = kernels.min_eigenvalue(g)
    ok = sym < 1e-10 and diag < 1e-10 and min_eig > -1e-8
    return CheckResult("fidelity Gram validity (sym / diag / PSD)", ok,
                       f"sym {sym:.1e}, diag {diag:.1e}, min eig {min_eig:.1e}")


def _check_svm() -> CheckResult:
    # analytic 2-point problem: alpha = 0.5 each, zero bias
    X = np.array([[-1.0], [1.0]])
    y = np.array([-1.0, 1.0])
    model = classifiers.svm_fit(kernels.linear_gram(X), y, C=1.0)
    alpha_err = float(np.max(np.abs(np.abs(model.dual_coefficients) - 0.5)))
    bias_err = abs(model.bias)

    rng = np.random.default_rng(3)
    Xr = rng.standard_normal((40, 3))
    yr = np.where(Xr[:, 0] + 0.3 * rng.standard_normal(40) > 0, 1.0, -1.0)
    if len(np.unique(yr)) < 2:
        yr[0] = -yr[0]
    gram = kernels.linear_gram(Xr)
    m = classifiers.svm_fit(gram, yr, C=1.0)
    kkt = _kkt_violation(m, gram.values, yr)
    ok = alpha_err < 1e-6 and bias_err < 1e-6 and kkt < 1e-3 + 1e-9
    return CheckResult("SMO analytic solution + KKT", ok,
                       f"alpha err {alpha_err:.1e}, bias {bias_err:.1e}, KKT {kkt:.1e}")


def _kkt_violation(model, K, y) -> float:
    alpha = np.zeros(len(y))
    alpha[model.support_indices] = np.abs(model.dual_coefficients)
    f = K[:, model.support_indices] @ model.dual_coefficients + model.bias
    margins = y * f
    worst = 0.0
    for i in range(len(y)):
        if alpha[i] <= 1e-9:
            worst = max(worst, 1.0 - margins[i])
        elif alpha[i] >= model.C - 1e-9:
            worst = max(worst, margins[i] - 1.0)
        else:
            worst = max(worst, abs(margins[i] - 1.0))
    return float(worst)


def _check_ci() -> CheckResult:
    q4 = t_quantile(0.975, 4)
    q44 = t_quantile(0.975, 44)
    from .stats import confidence_interval
    _, half = confidence_interval([0.5, 0.5, 0.5])
    ok = abs(q4 - 2.776) < 1e-3 and abs(q44 - 2.0154) < 1e-3 and half == 0.0
    return CheckResult("Student-t constants / constant-input CI", ok,
                       f"t(4) {q4:.4f}, t(44) {q44:.4f}, const half-width {half}")


def run_selfcheck(corrupt_gradient: bool = False) -> list[CheckResult]:
    return [
        _check_gates(),
        _check_gradient(corrupt=corrupt_gradient),
        _check_kernel(),
        _check_svm(),
        _check_ci(),
    ]
