"""Feature-file ingestion and deterministic synthetic datasets.

Feature files are plain delimited text: a header row
``class,f0,f1,...`` followed by one sample per line, class name first
and raw real-valued features after.  Users reproducing the full-scale
benchmark export their own per-sample feature vectors in this layout
(one fixed-length vector per image; how pixels become features is up to
the exporter).

Three synthetic structures support desk-scale runs:

  blobs      axis-aligned Gaussian clusters (linearly separable at the
             default separation),
  rings      concentric annuli replicated over several coordinate
             planes; class means coincide, so no linear rule works,
  xor-tiles  checkerboard clusters where every class occupies multiple
             disjoint tiles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

STRUCTURES = ("blobs", "rings", "xor-tiles")


@dataclass
class Dataset:
    features: np.ndarray  # (n_samples, raw_dim)
    labels: np.ndarray    # integer class ids
    class_names: list[str]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_count(self, class_id: int) -> int:
        return int(np.sum(self.labels == class_id))


def write_feature_file(path, dataset: Dataset) -> None:
    features = np.asarray(dataset.features, dtype=float)
    dim = features.shape[1]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("class," + ",".join(f"f{i}" for i in range(dim)) + "\n")
        for label, row in zip(dataset.labels, features):
            name = dataset.class_names[int(label)]
            fh.write(name + "," + ",".join(f"{v:.12g}" for v in row) + "\n")


def read_feature_file(path) -> Dataset:
    """Parse a feature file; malformed rows raise DataError with line numbers."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read feature file: {exc}") from None
    if not lines:
        raise DataError(f"{path}: empty feature file")
    header = lines[0].split(",")
    if len(header) < 2 or header[0] != "class":
        raise DataError(f"{path}:1: header must be 'class,<f0>,<f1>,...'")
    dim = len(header) - 1
    names: list[str] = []
    name_to_id: dict[str, int] = {}
    labels = []
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != dim + 1:
            raise DataError(f"{path}:{lineno}: expected {dim + 1} columns, got {len(parts)}")
        name = parts[0]
        try:
            values = np.array([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric feature value ({exc})") from None
        if not np.all(np.isfinite(values)):
            raise DataError(f"{path}:{lineno}: non-finite feature value")
        if name not in name_to_id:
            name_to_id[name] = len(names)
            names.append(name)
        labels.append(name_to_id[name])
        rows.append(values)
    if not rows:
        raise DataError(f"{path}: no samples")
    return Dataset(np.vstack(rows), np.array(labels, dtype=int), names)


# ---------------------------------------------------------------------------
# Synthetic generators
# ---------------------------------------------------------------------------

def synth_dataset(structure: str, n_classes: int, per_class: int, raw_dim: int,
                  seed: int, separation: float = 6.0, noise: float | None = None) -> Dataset:
    """Deterministic synthetic dataset with controllable class overlap."""
    if structure not in STRUCTURES:
        raise DataError(f"unknown structure {structure!r}; choose one of {STRUCTURES}")
    if n_classes < 2:
        raise DataError("need at least 2 classes")
    if per_class < 4:
        raise DataError("need at least 4 samples per class")
    if raw_dim < 2:
        raise DataError("raw_dim must be >= 2")
    rng = np.random.default_rng(seed)
    if structure == "blobs":
        features, labels = _blobs(rng, n_classes, per_class, raw_dim, separation)
    elif structure == "rings":
        features, labels = _rings(rng, n_classes, per_class, raw_dim,
                                  radial_noise=0.10 if noise is None else noise)
    else:
        features, labels = _xor_tiles(rng, n_classes, per_class, raw_dim,
                                      cluster_noise=0.25 if noise is None else noise)
    names = [f"c{i}" for i in range(n_classes)]
    return Dataset(features, labels, names)


def _blobs(rng, n_classes, per_class, raw_dim, separation):
    features = []
    labels = []
    for c in range(n_classes):
        center = np.zeros(raw_dim)
        center[c % raw_dim] = separation * (1 + c // raw_dim)
        features.append(center + rng.standard_normal((per_class, raw_dim)))
        labels.append(np.full(per_class, c, dtype=int))
    return np.vstack(features), np.concatenate(labels)


def _rings(rng, n_classes, per_class, raw_dim, radial_noise, base_radius=1.0,
           gap=1.0, off_plane_noise=0.05):
    """Class c = annulus of radius base + c*gap, drawn in up to 4 planes."""
    n_planes = max(1, min(4, raw_dim // 2))
    features = []
    labels = []
    for c in range(n_classes):
        radius = base_radius + c * gap
        x = rng.standard_normal((per_class, raw_dim)) * off_plane_noise
        for p in range(n_planes):
            theta = rng.uniform(0.0, 2.0 * np.pi, per_class)
            r = radius + rng.standard_normal(per_class) * radial_noise
            x[:, 2 * p] = r * np.cos(theta)
            x[:, 2 * p + 1] = r * np.sin(theta)
        features.append(x)
        labels.append(np.full(per_class, c, dtype=int))
    return np.vstack(features), np.concatenate(labels)


def _xor_tiles(rng, n_classes, per_class, raw_dim, cluster_noise, spacing=2.0):
    """2 x n_classes grid of tiles; class of tile (row, col) = (col+row) mod k,
    so every class owns two non-adjacent tiles (checkerboard at k=2)."""
    tiles_by_class = {c: [] for c in range(n_classes)}
    for row in range(2):
        for col in range(n_classes):
            cls = (col + row) % n_classes
            center = np.array([(col - (n_classes - 1) / 2) * spacing,
                               (row - 0.5) * spacing])
            tiles_by_class[cls].append(center)
    features = []
    labels = []
    for c in range(n_classes):
        tiles = tiles_by_class[c]
        counts = [per_class // len(tiles)] * len(tiles)
        counts[0] += per_class - sum(counts)
        x = rng.standard_normal((per_class, raw_dim)) * 0.05
        pos = 0
        for center, cnt in zip(tiles, counts):
            x[pos:pos + cnt, 0] = center[0] + rng.standard_normal(cnt) * cluster_noise
            x[pos:pos + cnt, 1] = center[1] + rng.standard_normal(cnt) * cluster_noise
            pos += cnt
        features.append(x)
        labels.append(np.full(per_class, c, dtype=int))
    return np.vstack(features), np.concatenate(labels)
