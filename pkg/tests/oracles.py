"""Independent brute-force oracles for the test suite.

Everything here builds full 2^n x 2^n matrices with Kronecker products
and composes them explicitly, deliberately avoiding the package's
strided kernels.  Conventions mirrored from the documented contract:
qubit 0 is the most significant basis-index bit; R_n(t) = exp(-i t P/2).
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def rotation_matrix(axis: str, angle: float) -> np.ndarray:
    pauli = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}[axis]
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * pauli


def lift(U: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Single-qubit U on `qubit` as a full 2^n matrix (qubit 0 = MSB)."""
    left = np.eye(1 << qubit, dtype=complex)
    right = np.eye(1 << (n_qubits - qubit - 1), dtype=complex)
    return np.kron(np.kron(left, U), right)


def cnot_matrix(control: int, target: int, n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    M = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        if (b >> (n_qubits - 1 - control)) & 1:
            M[b ^ (1 << (n_qubits - 1 - target)), b] = 1.0
        else:
            M[b, b] = 1.0
    return M


def z_expectation(amplitudes: np.ndarray, qubit: int, n_qubits: int) -> float:
    Z = lift(PAULI_Z, qubit, n_qubits)
    return float(np.real(np.conj(amplitudes) @ Z @ amplitudes))


def dense_embed(n_qubits: int, n_blocks: int, input_dim: int,
                params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Compose the full circuit unitary from the documented layout.

    Index formulas are written out by hand here so the oracle pins the
    parameter layout and feature schedule independently.
    """
    n = n_qubits
    dim = 1 << n
    state = np.zeros(dim, dtype=complex)
    state[0] = 1.0
    for q in range(n):
        state = lift(HADAMARD, q, n) @ state
    for q in range(1, n, 2):
        state = lift(PAULI_X, q, n) @ state
    for q in range(n):
        state = lift(rotation_matrix("y", params[2 * q]), q, n) @ state
        state = lift(rotation_matrix("z", params[2 * q + 1]), q, n) @ state
    for block in range(n_blocks):
        for q in range(n):
            slot = 2 * (block * n + q)
            i1, i2 = slot % input_dim, (slot + 1) % input_dim
            base = 2 * n + 6 * (block * n + q)
            a, b, c, d, e, f = params[base:base + 6]
            alpha = np.pi * (a * x[i1] + b)
            beta = np.pi * (c * x[i2] + d)
            gamma = np.pi * (e * (x[i1] + x[i2]) + f)
            state = lift(rotation_matrix("y", alpha), q, n) @ state
            state = lift(rotation_matrix("z", beta), q, n) @ state
            state = lift(rotation_matrix("x", gamma), q, n) @ state
        if n == 2:
            pairs = [(0, 1)]
        elif n == 1:
            pairs = []
        else:
            step = 1 if block % 2 == 0 else 2
            pairs = [(q, (q + step) % n) for q in range(n)]
        for control, target in pairs:
            state = cnot_matrix(control, target, n) @ state
    return state


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phi} b| over entries at the optimal global phase."""
    overlap = np.vdot(b, a)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-12 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def central_difference(f, x0: np.ndarray, h: float = 1e-5) -> np.ndarray:
    grad = np.zeros_like(x0)
    for k in range(x0.size):
        step = np.zeros_like(x0)
        step[k] = h
        grad[k] = (f(x0 + step) - f(x0 - step)) / (2 * h)
    return grad
