"""Quantum-feature-map classification benchmark toolkit."""

from .circuit import CircuitSpec, embed, encode_angles, entangling_layer, param_count
from .kernels import KernelMatrix, fidelity_kernel, gram
from .pipeline import BenchmarkConfig, EvalReport, make_pair_task, qubit_sweep, run_benchmark
from .simulator import QState, expect_z, inner_product, zero_state
from .stats import confidence_interval, t_quantile
from .training import LinearHead, TrainConfig, TrainResult, train_vqc

__version__ = "0.1.0"

__all__ = [
    "BenchmarkConfig",
    "CircuitSpec",
    "EvalReport",
    "KernelMatrix",
    "LinearHead",
    "QState",
    "TrainConfig",
    "TrainResult",
    "confidence_interval",
    "embed",
    "encode_angles",
    "entangling_layer",
    "expect_z",
    "fidelity_kernel",
    "gram",
    "inner_product",
    "make_pair_task",
    "param_count",
    "qubit_sweep",
    "run_benchmark",
    "t_quantile",
    "train_vqc",
    "zero_state",
]
