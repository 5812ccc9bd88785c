"""Data re-uploading circuit family with affine data-dependent angles.

Architecture, in gate-application order:

  1. Hadamard on every qubit.
  2. Pauli-X on the odd-indexed qubits (1, 3, 5, ...).
  3. Per qubit, trainable R_y(theta_y) then R_z(theta_z).
  4. For block l = 0..n_blocks-1: per qubit R_y(alpha), R_z(beta),
     R_x(gamma) where the three angles are affine in two selected input
     features (see `encode_angles`), then a fixed CNOT entangling layer
     alternating between a nearest-neighbour ring (even blocks) and a
     stride-2 pattern (odd blocks).

Trainable parameters live in one flat vector of length
2*n_qubits + 6*n_blocks*n_qubits (= 38*n_qubits at the default six
blocks): initialization angles first (per qubit, y then z), then per
block / per qubit the six affine coefficients a..f.  The layout is the
canonical order for checkpoints; use `init_angle_index` /
`coeff_index` rather than hand-computing offsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import simulator as sim
from .simulator import QState

COEFF_NAMES = "abcdef"


@dataclass(frozen=True)
class CircuitSpec:
    """Architecture constants: qubit count, block count, input dimension."""

    n_qubits: int
    n_blocks: int = 6
    input_dim: int = 16

    def __post_init__(self):
        if not 1 <= self.n_qubits <= sim.MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{sim.MAX_QUBITS}")
        if self.n_blocks < 0:
            raise ValueError("n_blocks must be >= 0")
        if self.input_dim < 2:
            raise ValueError("input_dim must be >= 2")


def param_count(spec: CircuitSpec) -> int:
    """2 init angles per qubit plus 6 coefficients per (block, qubit)."""
    return 2 * spec.n_qubits + 6 * spec.n_blocks * spec.n_qubits


def init_angle_index(spec: CircuitSpec, qubit: int, which: str) -> int:
    """Flat index of an initialization angle; `which` is 'y' or 'z'."""
    if which not in ("y", "z"):
        raise ValueError("which must be 'y' or 'z'")
    return 2 * qubit + (0 if which == "y" else 1)


def coeff_index(spec: CircuitSpec, block: int, qubit: int, name: str) -> int:
    """Flat index of coefficient a..f for (block, qubit)."""
    k = COEFF_NAMES.index(name)
    return 2 * spec.n_qubits + 6 * (block * spec.n_qubits + qubit) + k


def feature_indices(spec: CircuitSpec, block: int, qubit: int) -> tuple[int, int]:
    """The two input components consumed by (block, qubit).

    Round-robin over the inputs: slot s = block*n_qubits + qubit selects
    features 2s mod d and (2s+1) mod d, so every coordinate of a
    d=16 input is touched by the 4-qubit, 6-block circuit.
    """
    slot = 2 * (block * spec.n_qubits + qubit)
    return slot % spec.input_dim, (slot + 1) % spec.input_dim


def encode_angles(spec: CircuitSpec, params: np.ndarray, x: np.ndarray,
                  block: int, qubit: int) -> tuple[float, float, float]:
    """(alpha, beta, gamma) for one encoding unit.

    alpha = pi*(a*x_i1 + b), beta = pi*(c*x_i2 + d),
    gamma = pi*(e*(x_i1 + x_i2) + f).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.input_dim,):
        raise ValueError(f"input must have length {spec.input_dim}, got shape {x.shape}")
    i1, i2 = feature_indices(spec, block, qubit)
    a, b, c, d, e, f = (params[coeff_index(spec, block, qubit, n)] for n in COEFF_NAMES)
    alpha = np.pi * (a * x[i1] + b)
    beta = np.pi * (c * x[i2] + d)
    gamma = np.pi * (e * (x[i1] + x[i2]) + f)
    return float(alpha), float(beta), float(gamma)


def entangling_layer(spec: CircuitSpec, block: int) -> list[tuple[int, int]]:
    """CNOT (control, target) pairs for one block.

    Even blocks: ring CNOT(q -> q+1 mod n).  Odd blocks: stride-2
    CNOT(q -> q+2 mod n).  One qubit entangles nothing; two qubits
    collapse both patterns to a single CNOT(0 -> 1).
    """
    n = spec.n_qubits
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    step = 1 if block % 2 == 0 else 2
    pairs = [(q, (q + step) % n) for q in range(n)]
    return [p for p in pairs if p[0] != p[1]]


# ---------------------------------------------------------------------------
# Gate program: the circuit unrolled to a flat op list, built once per spec.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RotOp:
    """One rotation gate and how its angle depends on parameters and data.

    Init-block gates: angle = params[offset] (scale = -1, no data term).
    Encoding gates: angle = pi * (params[scale] * u + params[offset])
    with u = x[i1] ('x1'), x[i2] ('x2') or x[i1] + x[i2] ('sum').
    """

    axis: str
    qubit: int
    offset: int
    scale: int = -1
    i1: int = -1
    i2: int = -1
    mode: str = "init"


@dataclass(frozen=True)
class FixedOp:
    gate: str  # 'h' | 'x' | 'cnot'
    qubit: int
    target: int = -1


@lru_cache(maxsize=None)
def gate_program(spec: CircuitSpec) -> tuple:
    ops: list = []
    for q in range(spec.n_qubits):
        ops.append(FixedOp("h", q))
    for q in range(1, spec.n_qubits, 2):
        ops.append(FixedOp("x", q))
    for q in range(spec.n_qubits):
        ops.append(RotOp("y", q, init_angle_index(spec, q, "y")))
        ops.append(RotOp("z", q, init_angle_index(spec, q, "z")))
    for block in range(spec.n_blocks):
        for q in range(spec.n_qubits):
            i1, i2 = feature_indices(spec, block, q)
            base = coeff_index(spec, block, q, "a")
            ops.append(RotOp("y", q, base + 1, base + 0, i1, i2, "x1"))
            ops.append(RotOp("z", q, base + 3, base + 2, i1, i2, "x2"))
            ops.append(RotOp("x", q, base + 5, base + 4, i1, i2, "sum"))
        for control, target in entangling_layer(spec, block):
            ops.append(FixedOp("cnot", control, target))
    return tuple(ops)


def data_term(op: RotOp, X: np.ndarray) -> np.ndarray:
    """The per-sample feature value u that multiplies params[scale]."""
    if op.mode == "x1":
        return X[:, op.i1]
    if op.mode == "x2":
        return X[:, op.i2]
    return X[:, op.i1] + X[:, op.i2]


def rot_angles(op: RotOp, params: np.ndarray, X: np.ndarray) -> np.ndarray:
    if op.mode == "init":
        return np.full(X.shape[0], params[op.offset])
    return np.pi * (params[op.scale] * data_term(op, X) + params[op.offset])


def _apply_fixed(states: np.ndarray, n_qubits: int, op: FixedOp) -> None:
    if op.gate == "h":
        sim.h_many(states, n_qubits, op.qubit)
    elif op.gate == "x":
        sim.x_many(states, n_qubits, op.qubit)
    else:
        sim.cnot_many(states, n_qubits, op.qubit, op.target)


def embed_batch(spec: CircuitSpec, params: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Embed every row of X; returns states of shape (len(X), 2**n_qubits)."""
    params = np.asarray(params, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != spec.input_dim:
        raise ValueError(f"inputs must have {spec.input_dim} features, got {X.shape[1]}")
    if params.shape != (param_count(spec),):
        raise ValueError(f"expected {param_count(spec)} parameters, got shape {params.shape}")
    states = sim.zero_states(spec.n_qubits, X.shape[0])
    for op in gate_program(spec):
        if isinstance(op, RotOp):
            sim.rotation_many(states, spec.n_qubits, op.axis, op.qubit, rot_angles(op, params, X))
        else:
            _apply_fixed(states, spec.n_qubits, op)
    return states


def embed(spec: CircuitSpec, params: np.ndarray, x: np.ndarray) -> QState:
    """|psi_theta(x)>: the circuit's embedding of one input vector."""
    states = embed_batch(spec, params, np.asarray(x, dtype=float)[None, :])
    return QState(spec.n_qubits, states[0])


def readout_features(state: QState) -> np.ndarray:
    """z = (<Z_0>, ..., <Z_{n-1}>), each entry in [-1, 1]."""
    return sim.expect_z_many(state.amplitudes[None, :], state.n_qubits)[0]


def readout_features_batch(states: np.ndarray, n_qubits: int) -> np.ndarray:
    return sim.expect_z_many(states, n_qubits)
