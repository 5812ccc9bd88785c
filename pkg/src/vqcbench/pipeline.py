"""One-vs-one evaluation protocol: per-pair PCA + standardization on
training statistics only, fixed splits, all class pairs x seeds across
the model zoo, per-class / macro aggregation with Student-t intervals,
and the qubit-count sweep.

Splits are drawn once from SPLIT_SEED (never from the training seeds),
so the five training runs of a pair see identical data.  Deterministic
models (logreg and the direct SVMs) are fitted once per pair and their
accuracy is replicated across seeds, which pins their seed CI to zero.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import classifiers, kernels, training
from .circuit import CircuitSpec, param_count
from .errors import DataError
from .datasets import Dataset
from .stats import confidence_interval
from .training import TrainConfig

log = logging.getLogger(__name__)

# Data splits are fixed independently of the training seeds.
SPLIT_SEED = 1729

MODELS = ("logreg", "svm-linear", "svm-rbf", "nn", "vqc", "svm-qk")
DETERMINISTIC_MODELS = ("logreg", "svm-linear", "svm-rbf")

FULL_TRAIN, FULL_VAL, FULL_TEST = 1400, 300, 300


# ---------------------------------------------------------------------------
# Preprocessing
# ---------------------------------------------------------------------------

@dataclass
class PcaBasis:
    mean: np.ndarray
    components: np.ndarray  # (n_components, raw_dim)


def pca_fit(X: np.ndarray, n_components: int) -> PcaBasis:
    """Top eigenvectors of the mean-centered training covariance.

    Each component's largest-magnitude entry is made positive so the
    basis (and everything downstream) is sign-stable.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, d = X.shape
    if n_components > min(n, d):
        raise DataError(f"cannot fit {n_components} components from {n} samples of dim {d}")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / n
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:n_components]
    comps = eigvecs[:, order].T
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaBasis(mean=mean, components=comps)


def pca_transform(basis: PcaBasis, X: np.ndarray) -> np.ndarray:
    return (np.atleast_2d(np.asarray(X, dtype=float)) - basis.mean) @ basis.components.T


def standardize_fit(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Columnwise training mean and standard deviation (population).

    Zero-variance columns get sigma = 1 so constant features pass
    through inert instead of dividing by zero.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    degenerate = sigma == 0.0
    if np.any(degenerate):
        log.warning("standardize: %d zero-variance feature(s); sigma set to 1",
                    int(degenerate.sum()))
        sigma = np.where(degenerate, 1.0, sigma)
    return mu, sigma


def standardize_apply(stats: tuple[np.ndarray, np.ndarray], X: np.ndarray) -> np.ndarray:
    mu, sigma = stats
    return (np.atleast_2d(np.asarray(X, dtype=float)) - mu) / sigma


# ---------------------------------------------------------------------------
# Pair tasks
# ---------------------------------------------------------------------------

@dataclass
class SplitSizes:
    n_train: int
    n_val: int
    n_test: int

    def __post_init__(self):
        if self.n_train < 2 or self.n_val < 1 or self.n_test < 1:
            raise DataError(f"split sizes too small: {self}")

    @property
    def per_class(self) -> int:
        return self.n_train + self.n_val + self.n_test


def full_split() -> SplitSizes:
    return SplitSizes(FULL_TRAIN, FULL_VAL, FULL_TEST)


def scaled_split(fraction: float) -> SplitSizes:
    """Desk-scale split: the 1400/300/300 protocol scaled by `fraction`."""
    if not 0.0 < fraction <= 1.0:
        raise DataError("desk-scale fraction must be in (0, 1]")
    return SplitSizes(
        max(2, round(FULL_TRAIN * fraction)),
        max(1, round(FULL_VAL * fraction)),
        max(1, round(FULL_TEST * fraction)),
    )


@dataclass
class PairTask:
    """One one-vs-one task with its fixed split and fitted preprocessing."""

    class_a: int
    class_b: int
    name_a: str
    name_b: str
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray
    pca: PcaBasis
    mu: np.ndarray
    sigma: np.ndarray
    train_x: np.ndarray
    train_y: np.ndarray
    val_x: np.ndarray
    val_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray


def make_pair_task(dataset: Dataset, class_a: int, class_b: int,
                   sizes: SplitSizes, n_components: int) -> PairTask:
    """Deterministic split + train-only PCA and standardization.

    Labels: +1 for class_a, -1 for class_b.
    """
    if class_a == class_b:
        raise DataError("pair classes must differ")
    rng = np.random.default_rng([SPLIT_SEED, class_a, class_b])
    segments = {"train": [], "val": [], "test": []}
    for cls in (class_a, class_b):
        idx = np.flatnonzero(dataset.labels == cls)
        if len(idx) < sizes.per_class:
            raise DataError(
                f"class {dataset.class_names[cls]!r} has {len(idx)} samples; "
                f"the split needs {sizes.per_class} (use desk-scale mode?)"
            )
        perm = rng.permutation(idx)
        segments["train"].append(perm[:sizes.n_train])
        segments["val"].append(perm[sizes.n_train:sizes.n_train + sizes.n_val])
        segments["test"].append(perm[sizes.n_train + sizes.n_val:sizes.per_class])
    train_idx = np.concatenate(segments["train"])
    val_idx = np.concatenate(segments["val"])
    test_idx = np.concatenate(segments["test"])

    basis = pca_fit(dataset.features[train_idx], n_components)
    stats = standardize_fit(pca_transform(basis, dataset.features[train_idx]))

    def view(idx):
        x = standardize_apply(stats, pca_transform(basis, dataset.features[idx]))
        y = np.where(dataset.labels[idx] == class_a, 1, -1)
        return x, y

    train_x, train_y = view(train_idx)
    val_x, val_y = view(val_idx)
    test_x, test_y = view(test_idx)
    return PairTask(
        class_a=class_a, class_b=class_b,
        name_a=dataset.class_names[class_a], name_b=dataset.class_names[class_b],
        train_idx=train_idx, val_idx=val_idx, test_idx=test_idx,
        pca=basis, mu=stats[0], sigma=stats[1],
        train_x=train_x, train_y=train_y,
        val_x=val_x, val_y=val_y,
        test_x=test_x, test_y=test_y,
    )


def all_pairs(n_classes: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n_classes) for b in range(a + 1, n_classes)]


# ---------------------------------------------------------------------------
# Benchmark configuration and report containers
# ---------------------------------------------------------------------------

@dataclass
class BenchmarkConfig:
    models: tuple = MODELS
    seeds: tuple = (0, 1, 2, 3, 4)
    pca_components: int = 16
    split: SplitSizes = field(default_factory=full_split)
    n_qubits: int = 4
    n_blocks: int = 6
    batch_size: int = 64
    learning_rate: float = 1e-2
    vqc_max_epochs: int = 80
    vqc_patience: int = 40
    nn_max_epochs: int = 500
    svm_c: float = 1.0
    logreg_c: float = 1.0
    logreg_max_iter: int = 5000
    workers: int = 1
    keep_checkpoints: bool = False

    def __post_init__(self):
        unknown = [m for m in self.models if m not in MODELS]
        if unknown:
            raise DataError(f"unknown model(s) {unknown}; choose from {MODELS}")
        if not self.models:
            raise DataError("select at least one model")
        if not self.seeds:
            raise DataError("select at least one seed")

    def vqc_train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate, batch_size=self.batch_size,
            max_epochs=self.vqc_max_epochs, patience=self.vqc_patience, seed=seed,
        )

    def nn_train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate, batch_size=self.batch_size,
            max_epochs=self.nn_max_epochs, patience=self.nn_max_epochs, seed=seed,
        )


@dataclass
class Record:
    class_a: str
    class_b: str
    model: str
    seed: int
    accuracy: float
    wall_time: float


@dataclass
class RunRecord:
    class_a: str
    class_b: str
    model: str
    seed: int
    epochs_run: int
    best_epoch: int
    best_val_accuracy: float
    loss_trace: list


@dataclass
class EvalError:
    class_a: str
    class_b: str
    model: str
    seed: int
    message: str


@dataclass
class Checkpoint:
    class_a: str
    class_b: str
    seed: int
    spec: CircuitSpec
    params: np.ndarray
    head_w: np.ndarray
    head_b: float


@dataclass
class EvalReport:
    meta: dict
    records: list
    training_runs: list
    per_class: dict   # model -> class name -> (mean, ci_half)
    macro: dict       # model -> (mean, mean of per-class ci halves)
    errors: list = field(default_factory=list)
    checkpoints: list = field(default_factory=list, compare=False)


# ---------------------------------------------------------------------------
# Per-pair execution (the unit of parallelism)
# ---------------------------------------------------------------------------

def _accuracy(pred, y) -> float:
    return float(np.mean(pred == y))


def _run_pair(task: PairTask, config: BenchmarkConfig):
    records: list[Record] = []
    runs: list[RunRecord] = []
    errors: list[EvalError] = []
    checkpoints: list[Checkpoint] = []
    pair = (task.name_a, task.name_b)

    def guarded(model: str, seed: int, fn):
        try:
            fn()
        except Exception as exc:  # per-task failures are recorded, not fatal
            log.warning("pair %s|%s model %s seed %d failed: %s",
                        pair[0], pair[1], model, seed, exc)
            errors.append(EvalError(*pair, model, seed, f"{type(exc).__name__}: {exc}"))

    # Deterministic models: fit once, replicate across seeds.
    if "logreg" in config.models:
        def run_logreg():
            t0 = time.perf_counter()
            model = classifiers.logreg_fit(task.train_x, task.train_y,
                                           C=config.logreg_c, max_iter=config.logreg_max_iter)
            acc = _accuracy(classifiers.logreg_predict(model, task.test_x), task.test_y)
            dt = time.perf_counter() - t0
            for seed in config.seeds:
                records.append(Record(*pair, "logreg", seed, acc, dt))
        guarded("logreg", -1, run_logreg)

    for name, kind in (("svm-linear", "linear"), ("svm-rbf", "rbf")):
        if name in config.models:
            def run_svm(name=name, kind=kind):
                t0 = time.perf_counter()
                svm = classifiers.KernelSvm(kind=kind, C=config.svm_c)
                svm.fit(task.train_x, task.train_y)
                acc = _accuracy(svm.predict(task.test_x), task.test_y)
                dt = time.perf_counter() - t0
                for seed in config.seeds:
                    records.append(Record(*pair, name, seed, acc, dt))
            guarded(name, -1, run_svm)

    if "nn" in config.models:
        for seed in config.seeds:
            def run_nn(seed=seed):
                t0 = time.perf_counter()
                model = classifiers.mlp_fit(task.train_x, task.train_y,
                                            config.nn_train_config(seed),
                                            val_x=task.val_x, val_y=task.val_y)
                acc = _accuracy(classifiers.mlp_predict(model, task.test_x), task.test_y)
                dt = time.perf_counter() - t0
                records.append(Record(*pair, "nn", seed, acc, dt))
                tr = model.train_result
                runs.append(RunRecord(*pair, "nn", seed, tr.epochs_run, tr.best_epoch,
                                      tr.best_val_accuracy, tr.loss_trace))
            guarded("nn", seed, run_nn)

    need_circuit = "vqc" in config.models or "svm-qk" in config.models
    if need_circuit:
        spec = CircuitSpec(n_qubits=config.n_qubits, n_blocks=config.n_blocks,
                           input_dim=config.pca_components)
        for seed in config.seeds:
            def run_circuit(seed=seed):
                t0 = time.perf_counter()
                result = training.train_vqc(spec, task, config.vqc_train_config(seed))
                dt_train = time.perf_counter() - t0
                runs.append(RunRecord(*pair, "vqc", seed, result.epochs_run,
                                      result.best_epoch, result.best_val_accuracy,
                                      result.loss_trace))
                if config.keep_checkpoints:
                    checkpoints.append(Checkpoint(*pair, seed, spec, result.best_params,
                                                  result.best_head.w, result.best_head.b))
                if "vqc" in config.models:
                    scores = training.vqc_scores(spec, result.best_params,
                                                 result.best_head, task.test_x)
                    acc = _accuracy(training.predict_labels(scores), task.test_y)
                    records.append(Record(*pair, "vqc", seed, acc, dt_train))
                if "svm-qk" in config.models:
                    def run_qk():
                        t1 = time.perf_counter()
                        cache = kernels.EmbeddingCache(spec, result.best_params)
                        gram_tr = kernels.gram(spec, result.best_params,
                                               task.train_x, cache=cache)
                        svm = classifiers.svm_fit(gram_tr, task.train_y, C=config.svm_c)
                        gram_te = kernels.gram(spec, result.best_params, task.test_x,
                                               task.train_x, cache=cache)
                        acc = _accuracy(classifiers.svm_predict(svm, gram_te), task.test_y)
                        records.append(Record(*pair, "svm-qk", seed, acc,
                                              dt_train + time.perf_counter() - t1))
                    guarded("svm-qk", seed, run_qk)
            guarded("vqc", seed, run_circuit)

    return records, runs, errors, checkpoints


def _run_pair_star(args):
    return _run_pair(*args)


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def aggregate(records: list, class_names: list, models, seeds):
    """Per-class means/CIs over seeds and the macro summary per model.

    Per-class, per-seed metric: the mean accuracy over all pairs that
    contain the class at that seed.  The per-class CI is the Student-t
    half-width across those per-seed values.  The macro row reports the
    mean of per-class means; its +- value is the mean of the per-class
    CI half-widths (a summary, not an independent interval).
    """
    acc = {}
    for r in records:
        acc.setdefault(r.model, {}).setdefault((r.class_a, r.class_b), {})[r.seed] = r.accuracy
    per_class: dict = {}
    macro: dict = {}
    for model in models:
        pair_accs = acc.get(model, {})
        per_class[model] = {}
        means, halves = [], []
        for cls in class_names:
            per_seed = []
            for seed in seeds:
                vals = [pair_accs[p][seed] for p in pair_accs
                        if cls in p and seed in pair_accs[p]]
                if vals:
                    per_seed.append(float(np.mean(vals)))
            if not per_seed:
                continue
            if len(per_seed) >= 2:
                mean, half = confidence_interval(per_seed)
            else:
                mean, half = per_seed[0], 0.0
            per_class[model][cls] = (mean, half)
            means.append(mean)
            halves.append(half)
        if means:
            macro[model] = (float(np.mean(means)), float(np.mean(halves)))
    return per_class, macro


def pair_seed_means(records: list, model: str) -> dict:
    """(class_a, class_b) -> accuracy averaged over seeds, for one model."""
    sums: dict = {}
    for r in records:
        if r.model != model:
            continue
        key = (r.class_a, r.class_b)
        sums.setdefault(key, []).append(r.accuracy)
    return {k: float(np.mean(v)) for k, v in sums.items()}


# ---------------------------------------------------------------------------
# Benchmark and sweep drivers
# ---------------------------------------------------------------------------

def _config_meta(dataset: Dataset, config: BenchmarkConfig) -> dict:
    return {
        "models": ",".join(config.models),
        "seeds": ",".join(str(s) for s in config.seeds),
        "pca_components": str(config.pca_components),
        "split": f"{config.split.n_train}/{config.split.n_val}/{config.split.n_test}",
        "n_qubits": str(config.n_qubits),
        "n_blocks": str(config.n_blocks),
        "batch_size": str(config.batch_size),
        "classes": ",".join(dataset.class_names),
        "split_seed": str(SPLIT_SEED),
    }


def _map_pairs(tasks, config: BenchmarkConfig):
    inputs = [(t, config) for t in tasks]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_run_pair_star, inputs))
    return [_run_pair_star(args) for args in inputs]


def run_benchmark(dataset: Dataset, config: BenchmarkConfig) -> EvalReport:
    """Train/evaluate every selected model on every class pair and seed."""
    pairs = all_pairs(dataset.n_classes)
    tasks = [make_pair_task(dataset, a, b, config.split, config.pca_components)
             for a, b in pairs]
    results = _map_pairs(tasks, config)
    records: list[Record] = []
    runs: list[RunRecord] = []
    errors: list[EvalError] = []
    checkpoints: list[Checkpoint] = []
    for recs, rr, errs, cps in results:
        records.extend(recs)
        runs.extend(rr)
        errors.extend(errs)
        checkpoints.extend(cps)
    per_class, macro = aggregate(records, dataset.class_names, config.models, config.seeds)
    return EvalReport(
        meta=_config_meta(dataset, config),
        records=records, training_runs=runs,
        per_class=per_class, macro=macro,
        errors=errors, checkpoints=checkpoints,
    )


@dataclass
class SweepPoint:
    n_qubits: int
    param_count: int
    mean_accuracy: float
    ci_half: float
    n_pairs: int


@dataclass
class SweepResult:
    meta: dict
    points: list
    pair_means: dict   # n_qubits -> {(class_a, class_b): seed-mean accuracy}
    records: list      # (n_qubits, Record) tuples
    errors: list = field(default_factory=list)


def qubit_sweep(dataset: Dataset, config: BenchmarkConfig,
                n_qubits_list=(1, 2, 3, 4, 5, 6, 7)) -> SweepResult:
    """Re-run the circuit benchmark per qubit count (PCA-32 by default).

    The reported CI at each point is the Student-t interval across the
    45 pairwise seed-mean accuracies, not across seeds.
    """
    points: list[SweepPoint] = []
    pair_means: dict = {}
    sweep_records: list = []
    errors: list = []
    for n_q in n_qubits_list:
        cfg = replace(config, models=("vqc",), n_qubits=n_q)
        report = run_benchmark(dataset, cfg)
        means = pair_seed_means(report.records, "vqc")
        pair_means[n_q] = means
        sweep_records.extend((n_q, r) for r in report.records)
        errors.extend((n_q, e) for e in report.errors)
        values = list(means.values())
        if len(values) >= 2:
            mean, half = confidence_interval(values)
        else:
            mean, half = (values[0] if values else float("nan")), 0.0
        spec = CircuitSpec(n_qubits=n_q, n_blocks=config.n_blocks,
                           input_dim=config.pca_components)
        points.append(SweepPoint(n_q, param_count(spec), mean, half, len(values)))
    meta = _config_meta(dataset, config)
    meta["n_qubits"] = ",".join(str(q) for q in n_qubits_list)
    return SweepResult(meta=meta, points=points, pair_means=pair_means,
                       records=sweep_records, errors=errors)
