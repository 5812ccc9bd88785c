"""End-to-end circuit training: linear head, softplus logistic loss,
exact adjoint gradients, Adam, class-balanced batches, early stopping.

Gradients are exact (noiseless simulation): the loss depends on the
state only through the observable O = sum_q g_q Z_q with per-sample
weights g_q = dL/dz_q, so one reverse sweep per sample computes every
angle derivative.  Walking the gate list backwards with |phi> = |psi_k>
and |lam> = (product of later gates)^dag O |psi>, the derivative of a
rotation R_n(t) = exp(-i t P/2) contributes

    dE/dt = Im <lam| P |phi>,

which is then chained through the affine angle maps (the pi factor and
the data term for the a..f coefficients).  The whole sweep runs on
batched state stacks, one row per sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import circuit as circ
from . import simulator as sim
from .circuit import CircuitSpec, FixedOp, RotOp


@dataclass
class LinearHead:
    """Readout s = w . z + b on the per-qubit Z expectations."""

    w: np.ndarray
    b: float


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    batch_size: int = 64
    max_epochs: int = 80
    patience: int = 40
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 2 or self.batch_size % 2 != 0:
            raise ValueError("batch_size must be even (class-balanced batches)")
        if self.patience > self.max_epochs:
            raise ValueError("patience must not exceed max_epochs")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass
class TrainResult:
    best_params: np.ndarray
    best_head: LinearHead | None
    best_val_accuracy: float
    loss_trace: list[float] = field(default_factory=list)
    epochs_run: int = 0
    best_epoch: int = 0


def decision_score(z: np.ndarray, head: LinearHead) -> float:
    z = np.asarray(z, dtype=float)
    w = np.asarray(head.w, dtype=float)
    if z.shape != w.shape:
        raise ValueError(f"feature/weight length mismatch: {z.shape} vs {w.shape}")
    return float(w @ z + head.b)


def softplus_loss(scores, labels) -> float:
    """(1/B) sum log(1 + exp(-y s)), evaluated in overflow-safe form."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=float)
    if s.shape != y.shape:
        raise ValueError("scores and labels must have equal length")
    if s.size == 0:
        raise ValueError("empty batch")
    t = y * s
    # log(1 + exp(-t)) = log1p(exp(-|t|)) + max(-t, 0)
    return float(np.mean(np.log1p(np.exp(-np.abs(t))) + np.maximum(-t, 0.0)))


def predict_labels(scores: np.ndarray) -> np.ndarray:
    """sign(s) with s = 0 mapped to +1."""
    return np.where(np.asarray(scores) >= 0.0, 1, -1)


def accuracy(scores: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(predict_labels(scores) == np.asarray(labels)))


# ---------------------------------------------------------------------------
# Adjoint differentiation
# ---------------------------------------------------------------------------

def _adjoint_theta_grad(spec: CircuitSpec, params: np.ndarray, X: np.ndarray,
                        states: np.ndarray, obs_weights: np.ndarray) -> np.ndarray:
    """d/dtheta of sum_i <psi_i| O_i |psi_i>, O_i = sum_q obs_weights[i,q] Z_q.

    `states` is consumed.  phi and lam live stacked in one buffer so every
    undo gate is applied with a single kernel call.
    """
    n = spec.n_qubits
    B = states.shape[0]
    signs = sim.z_sign_matrix(n)  # (2**n, n)
    stack = np.concatenate([states, (obs_weights @ signs.T) * states], axis=0)
    phi = stack[:B]
    lam = stack[B:]
    grad = np.zeros(circ.param_count(spec))
    for op in reversed(circ.gate_program(spec)):
        if isinstance(op, RotOp):
            angles = circ.rot_angles(op, params, X)
            g = sim.pauli_overlap_imag(lam, phi, n, op.axis, op.qubit)
            if op.mode == "init":
                grad[op.offset] += g.sum()
            else:
                grad[op.scale] += np.pi * float(g @ circ.data_term(op, X))
                grad[op.offset] += np.pi * g.sum()
            sim.rotation_many(stack, n, op.axis, op.qubit,
                              np.concatenate([-angles, -angles]))
        elif op.gate == "h":  # H, X, CNOT are self-inverse
            sim.h_many(stack, n, op.qubit)
        elif op.gate == "x":
            sim.x_many(stack, n, op.qubit)
        else:
            sim.cnot_many(stack, n, op.qubit, op.target)
    return grad


def _loss_and_grads(spec: CircuitSpec, params: np.ndarray, w: np.ndarray, b: float,
                    X: np.ndarray, y: np.ndarray):
    """Batch loss plus exact gradients w.r.t. (theta, w, b)."""
    B = X.shape[0]
    states = circ.embed_batch(spec, params, X)
    z = sim.expect_z_many(states, spec.n_qubits)  # (B, n_q)
    s = z @ w + b
    t = y * s
    loss = float(np.mean(np.log1p(np.exp(-np.abs(t))) + np.maximum(-t, 0.0)))
    dscore = expit(-t) * (-y) / B  # per-sample dL/ds
    dw = z.T @ dscore
    db = float(dscore.sum())
    obs = dscore[:, None] * w[None, :]  # dL/dz, per sample
    dtheta = _adjoint_theta_grad(spec, params, X, states, obs)
    if not (np.isfinite(loss) and np.all(np.isfinite(dtheta)) and np.all(np.isfinite(dw))):
        raise FloatingPointError(
            f"non-finite training intermediates (loss={loss}, |dtheta|max="
            f"{np.max(np.abs(dtheta))})"
        )
    return loss, dtheta, dw, db


def gradient(spec: CircuitSpec, params: np.ndarray, head: LinearHead,
             X: np.ndarray, y: np.ndarray):
    """Exact gradient of the batch softplus loss: (dtheta, dw, db)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if len(X) != len(y):
        raise ValueError("batch samples and labels must have equal length")
    _, dtheta, dw, db = _loss_and_grads(
        spec, np.asarray(params, dtype=float), np.asarray(head.w, dtype=float),
        float(head.b), X, y)
    return dtheta, dw, db


# ---------------------------------------------------------------------------
# Optimizer and batching
# ---------------------------------------------------------------------------

class Adam:
    def __init__(self, n_params: int, config: TrainConfig):
        self.lr = config.learning_rate
        self.b1 = config.adam_beta1
        self.b2 = config.adam_beta2
        self.eps = config.adam_eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.b1 * self.m + (1 - self.b1) * grad
        self.v = self.b2 * self.v + (1 - self.b2) * grad * grad
        mhat = self.m / (1 - self.b1 ** self.t)
        vhat = self.v / (1 - self.b2 ** self.t)
        return params - self.lr * mhat / (np.sqrt(vhat) + self.eps)


def balanced_batches(rng: np.random.Generator, labels: np.ndarray,
                     batch_size: int) -> list[np.ndarray]:
    """Index batches with equal counts of each label, without replacement.

    Each class is reshuffled every call; the final batch may be shorter
    but stays balanced.  With unequal class sizes the surplus of the
    larger class is left out for that epoch.
    """
    y = np.asarray(labels)
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == -1)
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("training set must contain both classes")
    pos = rng.permutation(pos)
    neg = rng.permutation(neg)
    half = batch_size // 2
    n = min(len(pos), len(neg))
    batches = []
    for start in range(0, n, half):
        m = min(half, n - start)
        batches.append(np.concatenate([pos[start:start + m], neg[start:start + m]]))
    return batches


# ---------------------------------------------------------------------------
# Generic mini-batch trainer (shared by the circuit model and the MLP)
# ---------------------------------------------------------------------------

class TrainableModel:
    """Interface consumed by `fit_minibatch`."""

    def init_params(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def loss_and_grad(self, flat: np.ndarray, X: np.ndarray, y: np.ndarray):
        raise NotImplementedError

    def scores(self, flat: np.ndarray, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


def fit_minibatch(model: TrainableModel, train_x, train_y, val_x, val_y,
                  config: TrainConfig):
    """Adam over class-balanced batches with best-validation checkpointing.

    The metric is validation accuracy with ties broken by lower
    validation loss; training stops once `patience` epochs pass with no
    metric improvement (patience=0: the first non-improving epoch).
    Returns (best_flat_params, TrainResult-style fields dict).
    """
    train_x = np.asarray(train_x, dtype=float)
    train_y = np.asarray(train_y, dtype=float)
    val_x = np.asarray(val_x, dtype=float)
    val_y = np.asarray(val_y, dtype=float)
    if len(np.unique(train_y)) < 2:
        raise ValueError("training set must contain both classes")
    rng = np.random.default_rng(config.seed)
    flat = model.init_params(rng)
    adam = Adam(flat.size, config)

    best_flat = flat.copy()
    best_acc = -np.inf
    best_vloss = np.inf
    best_epoch = 0
    stale = 0
    loss_trace: list[float] = []
    epochs_run = 0

    for epoch in range(1, config.max_epochs + 1):
        epochs_run = epoch
        batch_losses = []
        for batch in balanced_batches(rng, train_y, config.batch_size):
            loss, grad = model.loss_and_grad(flat, train_x[batch], train_y[batch])
            flat = adam.step(flat, grad)
            batch_losses.append(loss)
        loss_trace.append(float(np.mean(batch_losses)))

        vscores = model.scores(flat, val_x)
        vacc = accuracy(vscores, val_y)
        vloss = softplus_loss(vscores, val_y)
        if vacc > best_acc or (vacc == best_acc and vloss < best_vloss):
            best_acc = vacc
            best_vloss = vloss
            best_flat = flat.copy()
            best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= max(config.patience, 1):
                break

    return best_flat, {
        "best_val_accuracy": float(best_acc),
        "loss_trace": loss_trace,
        "epochs_run": epochs_run,
        "best_epoch": best_epoch,
    }


# ---------------------------------------------------------------------------
# The circuit model with linear head
# ---------------------------------------------------------------------------

class VqcModel(TrainableModel):
    """Circuit parameters and linear head flattened into one vector."""

    INIT_PARAM_SCALE = 0.1
    INIT_HEAD_SCALE = 0.5

    def __init__(self, spec: CircuitSpec):
        self.spec = spec
        self.n_theta = circ.param_count(spec)

    def split(self, flat: np.ndarray):
        n, q = self.n_theta, self.spec.n_qubits
        return flat[:n], flat[n:n + q], float(flat[n + q])

    def init_params(self, rng: np.random.Generator) -> np.ndarray:
        theta = rng.uniform(-self.INIT_PARAM_SCALE, self.INIT_PARAM_SCALE, self.n_theta)
        w = rng.uniform(-self.INIT_HEAD_SCALE, self.INIT_HEAD_SCALE, self.spec.n_qubits)
        return np.concatenate([theta, w, [0.0]])

    def loss_and_grad(self, flat, X, y):
        theta, w, b = self.split(flat)
        loss, dtheta, dw, db = _loss_and_grads(self.spec, theta, w, b, X, y)
        return loss, np.concatenate([dtheta, dw, [db]])

    def scores(self, flat, X):
        theta, w, b = self.split(flat)
        states = circ.embed_batch(self.spec, theta, X)
        return sim.expect_z_many(states, self.spec.n_qubits) @ w + b


def train_vqc(spec: CircuitSpec, data, config: TrainConfig) -> TrainResult:
    """Train circuit + head on `data` (needs train_x/train_y/val_x/val_y)."""
    model = VqcModel(spec)
    flat, info = fit_minibatch(model, data.train_x, data.train_y,
                               data.val_x, data.val_y, config)
    theta, w, b = model.split(flat)
    return TrainResult(
        best_params=theta,
        best_head=LinearHead(w=w, b=b),
        best_val_accuracy=info["best_val_accuracy"],
        loss_trace=info["loss_trace"],
        epochs_run=info["epochs_run"],
        best_epoch=info["best_epoch"],
    )


def vqc_scores(spec: CircuitSpec, params: np.ndarray, head: LinearHead,
               X: np.ndarray) -> np.ndarray:
    """Decision scores of a trained circuit on a sample matrix."""
    states = circ.embed_batch(spec, params, X)
    return sim.expect_z_many(states, spec.n_qubits) @ np.asarray(head.w) + head.b


@dataclass
class SplitData:
    """Minimal train/validation/test container for the trainers."""

    train_x: np.ndarray
    train_y: np.ndarray
    val_x: np.ndarray
    val_y: np.ndarray
    test_x: np.ndarray | None = None
    test_y: np.ndarray | None = None
