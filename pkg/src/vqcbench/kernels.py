"""Fidelity kernel from a frozen circuit, classical kernels, Gram assembly.

The fidelity kernel K(x, x') = |<psi(x)|psi(x')>|^2 is computed exactly
from simulated state vectors (no shot noise, no inversion-test circuit).
Gram assembly embeds each distinct sample once: states are cached in an
`EmbeddingCache` keyed by the raw sample bytes, so the training states
are reused when the test-vs-train matrix is filled.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import circuit as circ
from .circuit import CircuitSpec

KERNEL_KINDS = ("fidelity", "linear", "rbf")

DEFAULT_CACHE_BUDGET_BYTES = 512 * 1024 * 1024


@dataclass
class KernelMatrix:
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        self.values = np.asarray(self.values, dtype=float)


@dataclass
class EmbeddingCache:
    """State vectors of already-embedded samples for one frozen circuit."""

    spec: CircuitSpec
    params: np.ndarray
    budget_bytes: int = DEFAULT_CACHE_BUDGET_BYTES
    _states: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        self._fingerprint = self.params.tobytes()

    def check(self, spec: CircuitSpec, params: np.ndarray) -> None:
        if spec != self.spec or np.asarray(params, dtype=float).tobytes() != self._fingerprint:
            raise ValueError("embedding cache was built for a different frozen circuit")

    def states_for(self, X: np.ndarray) -> np.ndarray:
        """(len(X), 2**n_qubits) state rows, embedding only unseen samples."""
        X = np.ascontiguousarray(X, dtype=float)
        keys = [row.tobytes() for row in X]
        missing = [i for i, k in enumerate(keys) if k not in self._states]
        dim = 1 << self.spec.n_qubits
        projected = (len(self._states) + len(set(keys[i] for i in missing))) * dim * 16
        if projected > self.budget_bytes:
            raise MemoryError(
                f"state cache would need {projected} bytes (> budget {self.budget_bytes}); "
                "raise the budget or reduce the sample count / qubit count"
            )
        if missing:
            new_states = circ.embed_batch(self.spec, self.params, X[missing])
            for row, i in enumerate(missing):
                self._states[keys[i]] = new_states[row]
        return np.stack([self._states[k] for k in keys])


def fidelity_kernel(spec: CircuitSpec, params: np.ndarray, x, xp) -> float:
    """Squared overlap of the two embedded states."""
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if x.shape != xp.shape:
        raise ValueError("inputs must have equal feature dimension")
    a = circ.embed(spec, params, x)
    b = circ.embed(spec, params, xp)
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def gram(spec: CircuitSpec, params: np.ndarray, left: np.ndarray,
         right: np.ndarray | None = None,
         cache: EmbeddingCache | None = None) -> KernelMatrix:
    """Fidelity Gram matrix; `right=None` means the symmetric self-kernel.

    The self-kernel computes the upper triangle and mirrors it so the
    result is exactly symmetric with an exact unit diagonal.
    """
    if cache is None:
        cache = EmbeddingCache(spec, params)
    else:
        cache.check(spec, params)
    left = np.atleast_2d(np.asarray(left, dtype=float))
    sl = cache.states_for(left)
    if right is None:
        overlaps = sl.conj() @ sl.T
        g = np.abs(overlaps) ** 2
        g = np.triu(g, 1)
        g = g + g.T
        np.fill_diagonal(g, 1.0)
        return KernelMatrix(g, "fidelity")
    right = np.atleast_2d(np.asarray(right, dtype=float))
    if right.shape[1] != left.shape[1]:
        raise ValueError("left and right sample sets must share the feature dimension")
    sr = cache.states_for(right)
    return KernelMatrix(np.abs(sl.conj() @ sr.T) ** 2, "fidelity")


def linear_kernel(x, xp) -> float:
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if x.shape != xp.shape:
        raise ValueError("inputs must have equal feature dimension")
    return float(x @ xp)


def rbf_kernel(x, xp, gamma: float) -> float:
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if x.shape != xp.shape:
        raise ValueError("inputs must have equal feature dimension")
    d = x - xp
    return float(np.exp(-gamma * (d @ d)))


def gamma_scale(train: np.ndarray) -> float:
    """1 / (n_features * population variance of all training entries)."""
    train = np.atleast_2d(np.asarray(train, dtype=float))
    var = float(train.var())
    if var <= 0.0:
        raise ValueError("training features have zero variance; gamma would be infinite")
    return 1.0 / (train.shape[1] * var)


def linear_gram(left: np.ndarray, right: np.ndarray | None = None) -> KernelMatrix:
    left = np.atleast_2d(np.asarray(left, dtype=float))
    if right is None:
        g = left @ left.T
        g = np.triu(g)
        g = g + np.triu(g, 1).T
        return KernelMatrix(g, "linear")
    right = np.atleast_2d(np.asarray(right, dtype=float))
    return KernelMatrix(left @ right.T, "linear")


def rbf_gram(left: np.ndarray, right: np.ndarray | None = None,
             gamma: float = 1.0) -> KernelMatrix:
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    left = np.atleast_2d(np.asarray(left, dtype=float))
    self_kernel = right is None
    right_m = left if self_kernel else np.atleast_2d(np.asarray(right, dtype=float))
    sq = (
        np.sum(left ** 2, axis=1)[:, None]
        + np.sum(right_m ** 2, axis=1)[None, :]
        - 2.0 * left @ right_m.T
    )
    np.maximum(sq, 0.0, out=sq)
    g = np.exp(-gamma * sq)
    if self_kernel:
        g = np.triu(g, 1)
        g = g + g.T
        np.fill_diagonal(g, 1.0)
    return KernelMatrix(g, "rbf")


def min_eigenvalue(km: KernelMatrix) -> float:
    return float(np.linalg.eigvalsh(km.values)[0])


# ---------------------------------------------------------------------------
# Binary dump: magic, version, rows, cols, kind code, then row-major float64.
# ---------------------------------------------------------------------------

_GRAM_MAGIC = b"GRMK"
_GRAM_HEADER = struct.Struct("<4sIQQB7x")


def dump_gram(km: KernelMatrix, path) -> None:
    rows, cols = km.values.shape
    kind_code = KERNEL_KINDS.index(km.kind)
    with open(path, "wb") as fh:
        fh.write(_GRAM_HEADER.pack(_GRAM_MAGIC, 1, rows, cols, kind_code))
        fh.write(np.ascontiguousarray(km.values, dtype="<f8").tobytes())


def load_gram(path) -> KernelMatrix:
    with open(path, "rb") as fh:
        header = fh.read(_GRAM_HEADER.size)
        magic, version, rows, cols, kind_code = _GRAM_HEADER.unpack(header)
        if magic != _GRAM_MAGIC:
            raise ValueError(f"{path}: not a Gram dump (bad magic {magic!r})")
        if version != 1:
            raise ValueError(f"{path}: unsupported Gram dump version {version}")
        data = np.frombuffer(fh.read(rows * cols * 8), dtype="<f8")
    if data.size != rows * cols:
        raise ValueError(f"{path}: truncated Gram dump")
    return KernelMatrix(data.reshape(rows, cols).copy(), KERNEL_KINDS[kind_code])
