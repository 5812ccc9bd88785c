"""Dense state-vector simulation of the gate set used by the circuit family.

Fixed conventions (test oracles and checkpoints depend on them):

  - Qubit 0 is the most significant bit of the basis index, so for two
    qubits the amplitude order is |00>, |01>, |10>, |11>.
  - R_x(t) = exp(-i t X / 2), R_y(t) = exp(-i t Y / 2),
    R_z(t) = diag(exp(-i t / 2), exp(+i t / 2)).
  - Hadamard and CNOT are the textbook matrices.

Gates act in place on the amplitude buffer through strided views; a full
2^n x 2^n matrix is never materialised.  Every single-state operation is
a thin wrapper over a batched kernel that works on a stack of states
(shape (batch, 2^n), one row per sample) so that embedding or
differentiating a whole mini-batch amortises the per-gate overhead.
All arithmetic is complex128.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_QUBITS = 16

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass
class QState:
    """Pure state of `n_qubits` qubits as a dense amplitude vector."""

    n_qubits: int
    amplitudes: np.ndarray  # shape (2**n_qubits,), complex128

    def copy(self) -> "QState":
        return QState(self.n_qubits, self.amplitudes.copy())


def zero_state(n_qubits: int) -> QState:
    """|0...0> on `n_qubits` qubits (resource-guarded to 1..16)."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return QState(n_qubits, amps)


def zero_states(n_qubits: int, count: int) -> np.ndarray:
    """Stack of `count` copies of |0...0>, shape (count, 2**n_qubits)."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    states = np.zeros((count, 1 << n_qubits), dtype=np.complex128)
    states[:, 0] = 1.0
    return states


def _check_qubit(n_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {n_qubits} qubits")


def _nd(states: np.ndarray, n_qubits: int) -> np.ndarray:
    # (batch, 2, 2, ..., 2) view; axis 1 + q is qubit q (MSB first).
    return states.reshape((states.shape[0],) + (2,) * n_qubits)


def _bit_slices(view: np.ndarray, qubit: int):
    s0 = [slice(None)] * view.ndim
    s1 = list(s0)
    s0[1 + qubit] = 0
    s1[1 + qubit] = 1
    return tuple(s0), tuple(s1)


# ---------------------------------------------------------------------------
# Batched kernels (mutate `states` in place)
# ---------------------------------------------------------------------------

def h_many(states: np.ndarray, n_qubits: int, qubit: int) -> None:
    v = _nd(states, n_qubits)
    s0, s1 = _bit_slices(v, qubit)
    a0 = v[s0].copy()
    a1 = v[s1]
    v[s0] = (a0 + a1) * _INV_SQRT2
    v[s1] = (a0 - a1) * _INV_SQRT2


def x_many(states: np.ndarray, n_qubits: int, qubit: int) -> None:
    v = _nd(states, n_qubits)
    s0, s1 = _bit_slices(v, qubit)
    a0 = v[s0].copy()
    v[s0] = v[s1]
    v[s1] = a0


def rotation_many(states: np.ndarray, n_qubits: int, axis: str, qubit: int, angles) -> None:
    """R_axis(angle) on `qubit`; `angles` is a scalar or one angle per row."""
    half = 0.5 * np.asarray(angles, dtype=float)
    if not np.all(np.isfinite(half)):
        raise ValueError("rotation angle must be finite")
    c = np.cos(half)
    s = np.sin(half)
    if c.ndim:  # per-row angles: line up with the (batch, ...) slice shape
        bshape = (c.shape[0],) + (1,) * (n_qubits - 1)
        c = c.reshape(bshape)
        s = s.reshape(bshape)
    v = _nd(states, n_qubits)
    s0, s1 = _bit_slices(v, qubit)
    if axis == "z":
        v[s0] *= c - 1j * s
        v[s1] *= c + 1j * s
        return
    a0 = v[s0].copy()
    a1 = v[s1]
    if axis == "x":
        v[s0] = c * a0 - 1j * s * a1
        v[s1] = c * a1 - 1j * s * a0
    elif axis == "y":
        v[s0] = c * a0 - s * a1
        v[s1] = s * a0 + c * a1
    else:
        raise ValueError(f"unknown rotation axis {axis!r}")


def cnot_many(states: np.ndarray, n_qubits: int, control: int, target: int) -> None:
    if control == target:
        raise ValueError("CNOT control and target must differ")
    v = _nd(states, n_qubits)
    sel0 = [slice(None)] * v.ndim
    sel0[1 + control] = 1
    sel1 = list(sel0)
    sel0[1 + target] = 0
    sel1[1 + target] = 1
    sel0 = tuple(sel0)
    sel1 = tuple(sel1)
    tmp = v[sel0].copy()
    v[sel0] = v[sel1]
    v[sel1] = tmp


def pauli_many(states: np.ndarray, n_qubits: int, axis: str, qubit: int) -> np.ndarray:
    """Return Pauli_axis applied to each row (input untouched)."""
    out = states.copy()
    v = _nd(out, n_qubits)
    s0, s1 = _bit_slices(v, qubit)
    if axis == "x":
        a0 = v[s0].copy()
        v[s0] = v[s1]
        v[s1] = a0
    elif axis == "y":
        a0 = v[s0].copy()
        v[s0] = -1j * v[s1]
        v[s1] = 1j * a0
    elif axis == "z":
        v[s1] *= -1.0
    else:
        raise ValueError(f"unknown Pauli axis {axis!r}")
    return out


def _row_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # sum over everything but the batch axis of conj(a) * b
    prod = a.conj() * b
    return prod.reshape(prod.shape[0], -1).sum(axis=1)


def pauli_overlap_imag(lam: np.ndarray, phi: np.ndarray, n_qubits: int,
                       axis: str, qubit: int) -> np.ndarray:
    """Im <lam_i| P_axis on `qubit` |phi_i> per row, without copying states."""
    vl = _nd(lam, n_qubits)
    vp = _nd(phi, n_qubits)
    s0, s1 = _bit_slices(vl, qubit)
    if axis == "x":
        val = _row_dot(vl[s0], vp[s1]) + _row_dot(vl[s1], vp[s0])
    elif axis == "y":
        val = 1j * (_row_dot(vl[s1], vp[s0]) - _row_dot(vl[s0], vp[s1]))
    elif axis == "z":
        val = _row_dot(vl[s0], vp[s0]) - _row_dot(vl[s1], vp[s1])
    else:
        raise ValueError(f"unknown Pauli axis {axis!r}")
    return val.imag


@lru_cache(maxsize=None)
def z_sign_matrix(n_qubits: int) -> np.ndarray:
    """(2**n, n) matrix of +-1: column q holds the Z_q eigenvalue per basis state."""
    idx = np.arange(1 << n_qubits)
    shifts = n_qubits - 1 - np.arange(n_qubits)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return 1.0 - 2.0 * bits.astype(float)


def expect_z_many(states: np.ndarray, n_qubits: int) -> np.ndarray:
    """(batch, n_qubits) matrix of <Z_q> per row."""
    probs = np.abs(states) ** 2
    return probs @ z_sign_matrix(n_qubits)


# ---------------------------------------------------------------------------
# Single-state operations (the QState contract; mutate and return the state)
# ---------------------------------------------------------------------------

def apply_h(state: QState, qubit: int) -> QState:
    _check_qubit(state.n_qubits, qubit)
    h_many(state.amplitudes[None, :], state.n_qubits, qubit)
    return state


def apply_x(state: QState, qubit: int) -> QState:
    _check_qubit(state.n_qubits, qubit)
    x_many(state.amplitudes[None, :], state.n_qubits, qubit)
    return state


def apply_rotation(state: QState, axis: str, qubit: int, angle: float) -> QState:
    _check_qubit(state.n_qubits, qubit)
    rotation_many(state.amplitudes[None, :], state.n_qubits, axis, qubit, float(angle))
    return state


def apply_cnot(state: QState, control: int, target: int) -> QState:
    _check_qubit(state.n_qubits, control)
    _check_qubit(state.n_qubits, target)
    cnot_many(state.amplitudes[None, :], state.n_qubits, control, target)
    return state


def expect_z(state: QState, qubit: int) -> float:
    _check_qubit(state.n_qubits, qubit)
    probs = np.abs(state.amplitudes) ** 2
    p = probs.reshape((2,) * state.n_qubits)
    axes = tuple(a for a in range(state.n_qubits) if a != qubit)
    marginal = p.sum(axis=axes) if axes else p
    return float(marginal[0] - marginal[1])


def inner_product(a: QState, b: QState) -> complex:
    """<a|b> = sum_i conj(a_i) b_i."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("inner product requires equal qubit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
