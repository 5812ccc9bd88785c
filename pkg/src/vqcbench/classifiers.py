"""Decision machines: soft-margin kernel SVM trained by SMO, L2 logistic
regression, and the fixed 16 -> 8 -> 4 -> 1 rectifier network.

The SVM solves the C-SVC dual

    min_a  (1/2) a^T Q a - e^T a,   Q_ij = y_i y_j K_ij,
    s.t.   0 <= a_i <= C,  y^T a = 0,

by sequential minimal optimization with maximal-violating-pair working
set selection, stopping when the KKT violation m - M falls below `tol`.
Decision values are f(x) = sum_sv a_i y_i K(x_i, x) + bias; ties
(f exactly 0) predict +1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from . import training
from .kernels import KernelMatrix, gamma_scale, linear_gram, rbf_gram
from .training import TrainConfig

log = logging.getLogger(__name__)

SMO_MAX_ITER = 1_000_000
SMO_TOL = 1e-3


@dataclass
class SvmModel:
    dual_coefficients: np.ndarray  # alpha_i * y_i over the support vectors
    support_indices: np.ndarray
    bias: float
    C: float
    n_train: int


def _gram_values(gram) -> np.ndarray:
    return gram.values if isinstance(gram, KernelMatrix) else np.asarray(gram, dtype=float)


def svm_fit(gram, labels, C: float = 1.0, tol: float = SMO_TOL,
            max_iter: int = SMO_MAX_ITER) -> SvmModel:
    """Solve the dual on a precomputed training self-kernel."""
    K = _gram_values(gram)
    y = np.asarray(labels, dtype=float)
    n = y.size
    if K.shape != (n, n):
        raise ValueError(f"gram must be square over the {n} training samples, got {K.shape}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1/+1")
    if len(np.unique(y)) < 2:
        raise ValueError("training labels must contain both classes")

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective, Q alpha - e

    pos = y > 0
    iters = 0
    m = M = 0.0
    while iters < max_iter:
        iters += 1
        yg = -y * grad
        up = (pos & (alpha < C)) | (~pos & (alpha > 0))
        low = (~pos & (alpha < C)) | (pos & (alpha > 0))
        up_idx = np.flatnonzero(up)
        low_idx = np.flatnonzero(low)
        if len(up_idx) == 0 or len(low_idx) == 0:
            break  # no violating pair can exist
        i = up_idx[np.argmax(yg[up_idx])]
        j = low_idx[np.argmin(yg[low_idx])]
        m = yg[i]
        M = yg[j]
        if m - M < tol:
            break

        Qi = y * K[i] * y[i]
        Qj = y * K[j] * y[j]
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(Qi[i] + Qj[j] + 2.0 * Qi[j], 1e-12)
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0 and alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = diff
            elif diff <= 0 and alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0 and alpha[i] > C:
                alpha[i] = C
                alpha[j] = C - diff
            elif diff <= 0 and alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            quad = max(Qi[i] + Qj[j] - 2.0 * Qi[j], 1e-12)
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
                elif alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
                elif alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        grad += Qi * (alpha[i] - old_i) + Qj * (alpha[j] - old_j)
    else:
        log.warning("SMO hit the %d-iteration cap with violation %.3g", max_iter, m - M)

    free = (alpha > 1e-12) & (alpha < C - 1e-12)
    yg = -y * grad
    if np.any(free):
        bias = float(np.mean(yg[free]))
    else:
        bias = float(0.5 * (m + M))

    support = np.flatnonzero(alpha > 1e-12)
    return SvmModel(
        dual_coefficients=(alpha * y)[support],
        support_indices=support,
        bias=bias,
        C=C,
        n_train=n,
    )


def svm_decision(model: SvmModel, cross_gram) -> np.ndarray:
    """Decision values on rows of a test-vs-train (or test-vs-support) kernel."""
    G = np.atleast_2d(_gram_values(cross_gram))
    n_sv = len(model.support_indices)
    if G.shape[1] == model.n_train:
        G = G[:, model.support_indices]
    elif G.shape[1] != n_sv:
        raise ValueError(
            f"cross gram has {G.shape[1]} columns; expected {model.n_train} (train) "
            f"or {n_sv} (support)"
        )
    return G @ model.dual_coefficients + model.bias


def svm_predict(model: SvmModel, cross_gram) -> np.ndarray:
    return training.predict_labels(svm_decision(model, cross_gram))


class KernelSvm:
    """Linear or RBF SVM that builds its own Gram matrices from raw features."""

    def __init__(self, kind: str = "linear", C: float = 1.0, gamma: float | None = None):
        if kind not in ("linear", "rbf"):
            raise ValueError("kind must be 'linear' or 'rbf'")
        self.kind = kind
        self.C = C
        self.gamma = gamma  # None: 1/(d * var) of the training matrix
        self.model: SvmModel | None = None
        self._sv_x: np.ndarray | None = None
        self._gamma_fit: float | None = None

    def fit(self, X, y) -> "KernelSvm":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "linear":
            train_gram = linear_gram(X)
        else:
            self._gamma_fit = self.gamma if self.gamma is not None else gamma_scale(X)
            train_gram = rbf_gram(X, gamma=self._gamma_fit)
        self.model = svm_fit(train_gram, y, C=self.C)
        self._sv_x = X[self.model.support_indices]
        return self

    def decision(self, X) -> np.ndarray:
        if self.model is None:
            raise RuntimeError("fit() first")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "linear":
            cross = linear_gram(X, self._sv_x)
        else:
            cross = rbf_gram(X, self._sv_x, gamma=self._gamma_fit)
        return svm_decision(self.model, cross)

    def predict(self, X) -> np.ndarray:
        return training.predict_labels(self.decision(X))


# ---------------------------------------------------------------------------
# L2 logistic regression
# ---------------------------------------------------------------------------

@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    C: float = 1.0
    max_iter: int = 5000


def _logreg_objective(wb, X, y, C):
    w, b = wb[:-1], wb[-1]
    t = y * (X @ w + b)
    loss = 0.5 * float(w @ w) + C * float(np.sum(np.logaddexp(0.0, -t)))
    coef = C * (-y) * expit(-t)
    return loss, np.append(w + X.T @ coef, coef.sum())


def logreg_fit(X, y, C: float = 1.0, max_iter: int = 5000) -> LogRegModel:
    """Minimize (1/2)||w||^2 + C sum log(1+exp(-y(w.x+b))), bias unpenalized."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if len(np.unique(y)) < 2:
        raise ValueError("labels must contain both classes")
    res = minimize(
        _logreg_objective, np.zeros(X.shape[1] + 1), args=(X, y, C),
        jac=True, method="L-BFGS-B",
        options={"maxiter": max_iter, "maxfun": 20 * max_iter, "gtol": 1e-8, "ftol": 1e-16},
    )
    return LogRegModel(weights=res.x[:-1], bias=float(res.x[-1]), C=C, max_iter=max_iter)


def logreg_decision(model: LogRegModel, X) -> np.ndarray:
    return np.atleast_2d(np.asarray(X, dtype=float)) @ model.weights + model.bias


def logreg_predict(model: LogRegModel, X) -> np.ndarray:
    return training.predict_labels(logreg_decision(model, X))


# ---------------------------------------------------------------------------
# Shallow rectifier network (16 -> 8 -> 4 -> 1 by default, 177 parameters)
# ---------------------------------------------------------------------------

@dataclass
class MlpModel:
    weights: list  # per layer, shape (fan_out, fan_in)
    biases: list
    layer_sizes: tuple
    train_result: training.TrainResult | None = field(default=None, compare=False)


def mlp_param_count(layer_sizes) -> int:
    return sum(layer_sizes[i + 1] * (layer_sizes[i] + 1) for i in range(len(layer_sizes) - 1))


class MlpNet(training.TrainableModel):
    """Flat-parameter adapter so the MLP shares the circuit trainer."""

    def __init__(self, layer_sizes):
        self.layer_sizes = tuple(layer_sizes)
        self.shapes = [
            (self.layer_sizes[i + 1], self.layer_sizes[i])
            for i in range(len(self.layer_sizes) - 1)
        ]

    def init_params(self, rng: np.random.Generator) -> np.ndarray:
        chunks = []
        for fan_out, fan_in in self.shapes:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            chunks.append(rng.uniform(-limit, limit, fan_out * fan_in))
            chunks.append(np.zeros(fan_out))
        return np.concatenate(chunks)

    def unpack(self, flat):
        Ws, bs = [], []
        pos = 0
        for fan_out, fan_in in self.shapes:
            Ws.append(flat[pos:pos + fan_out * fan_in].reshape(fan_out, fan_in))
            pos += fan_out * fan_in
            bs.append(flat[pos:pos + fan_out])
            pos += fan_out
        return Ws, bs

    def _forward(self, Ws, bs, X):
        activations = [X]
        h = X
        for layer, (W, b) in enumerate(zip(Ws, bs)):
            z = h @ W.T + b
            h = np.maximum(z, 0.0) if layer < len(Ws) - 1 else z
            activations.append(h)
        return activations

    def loss_and_grad(self, flat, X, y):
        Ws, bs = self.unpack(flat)
        acts = self._forward(Ws, bs, X)
        s = acts[-1][:, 0]
        t = y * s
        B = len(y)
        loss = float(np.mean(np.log1p(np.exp(-np.abs(t))) + np.maximum(-t, 0.0)))
        delta = (expit(-t) * (-y) / B)[:, None]  # dL/ds
        gWs, gbs = [None] * len(Ws), [None] * len(Ws)
        for layer in range(len(Ws) - 1, -1, -1):
            gWs[layer] = delta.T @ acts[layer]
            gbs[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ Ws[layer]) * (acts[layer] > 0.0)
        grad = np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in zip(gWs, gbs)])
        return loss, grad

    def scores(self, flat, X):
        Ws, bs = self.unpack(flat)
        return self._forward(Ws, bs, np.atleast_2d(np.asarray(X, dtype=float)))[-1][:, 0]


DEFAULT_MLP_HIDDEN = (8, 4)


def mlp_fit(X, y, config: TrainConfig, val_x=None, val_y=None,
            hidden=DEFAULT_MLP_HIDDEN) -> MlpModel:
    """Train the rectifier net with the shared mini-batch trainer.

    Validation data drives the best-epoch checkpoint; when omitted the
    training set doubles as validation.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if val_x is None:
        val_x, val_y = X, y
    net = MlpNet((X.shape[1],) + tuple(hidden) + (1,))
    flat, info = training.fit_minibatch(net, X, y, val_x, val_y, config)
    Ws, bs = net.unpack(flat)
    result = training.TrainResult(
        best_params=flat, best_head=None,
        best_val_accuracy=info["best_val_accuracy"], loss_trace=info["loss_trace"],
        epochs_run=info["epochs_run"], best_epoch=info["best_epoch"],
    )
    return MlpModel(weights=Ws, biases=bs, layer_sizes=net.layer_sizes, train_result=result)


def mlp_scores(model: MlpModel, X) -> np.ndarray:
    h = np.atleast_2d(np.asarray(X, dtype=float))
    last = len(model.weights) - 1
    for layer, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ W.T + b
        h = np.maximum(z, 0.0) if layer < last else z
    return h[:, 0]


def mlp_predict(model: MlpModel, X) -> np.ndarray:
    return training.predict_labels(mlp_scores(model, X))
