"""Mixed-data table representation, CSV ingestion, and the synthetic generator.

A :class:`MixedDataset` keeps numerical and categorical columns in separate
dense arrays so distance and embedding code can stay vectorized. Categorical
cells hold integer level indices into per-column level lists; missing cells are
tracked through a boolean mask over the original column order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

MISSING_TOKENS = ("", "NA")
MISSING_LEVEL = -1


class FeatureKind(Enum):
    NUMERICAL = "numerical"
    CATEGORICAL = "categorical"


def _parses_real(token: str) -> bool:
    try:
        return math.isfinite(float(token))
    except ValueError:
        return False


@dataclass(frozen=True)
class MixedDataset:
    """Column-typed table of numerical and categorical features.

    Attributes
    ----------
    columns : list of (name, FeatureKind)
        Original column order; used for CSV round-trips.
    numeric_values : ndarray, shape (n_rows, P)
        Real-valued features. NaN only where masked missing.
    categorical_values : ndarray, shape (n_rows, Q)
        Level indices into ``levels``; MISSING_LEVEL where masked missing.
    levels : list of list of str
        Ordered distinct level labels per categorical column.
    missing_mask : ndarray, shape (n_rows, P+Q)
        True where the cell was missing, in original column order.
    """

    columns: tuple
    numeric_values: np.ndarray
    categorical_values: np.ndarray
    levels: tuple
    missing_mask: np.ndarray

    def __post_init__(self):
        n = self.numeric_values.shape[0]
        p = self.numeric_values.shape[1]
        q = self.categorical_values.shape[1]
        if self.categorical_values.shape[0] != n or self.missing_mask.shape != (n, p + q):
            raise ValueError("inconsistent row counts across blocks")
        if n < 1 or p + q < 1:
            raise ValueError("dataset needs at least one row and one column")
        if len(self.columns) != p + q or len(self.levels) != q:
            raise ValueError("column metadata does not match value blocks")
        num_mask = self.numeric_mask
        if np.isnan(self.numeric_values[~num_mask]).any():
            raise ValueError("NaN present in a cell not flagged missing")
        for j, lv in enumerate(self.levels):
            col = self.categorical_values[:, j]
            ok = self.categorical_mask[:, j]
            if col[~ok].size and (col[~ok].min() < 0 or col[~ok].max() >= len(lv)):
                raise ValueError(f"level index out of range in categorical column {j}")

    # column bookkeeping ---------------------------------------------------

    @property
    def n_rows(self) -> int:
        return self.numeric_values.shape[0]

    @property
    def n_numeric(self) -> int:
        return self.numeric_values.shape[1]

    @property
    def n_categorical(self) -> int:
        return self.categorical_values.shape[1]

    @property
    def numeric_names(self):
        return [name for name, kind in self.columns if kind is FeatureKind.NUMERICAL]

    @property
    def categorical_names(self):
        return [name for name, kind in self.columns if kind is FeatureKind.CATEGORICAL]

    def _block_column_order(self):
        """Positions of each original column inside its typed block."""
        num_pos, cat_pos = [], []
        for idx, (_, kind) in enumerate(self.columns):
            (num_pos if kind is FeatureKind.NUMERICAL else cat_pos).append(idx)
        return num_pos, cat_pos

    @property
    def numeric_mask(self) -> np.ndarray:
        num_pos, _ = self._block_column_order()
        return self.missing_mask[:, num_pos] if num_pos else np.zeros((self.n_rows, 0), bool)

    @property
    def categorical_mask(self) -> np.ndarray:
        _, cat_pos = self._block_column_order()
        return self.missing_mask[:, cat_pos] if cat_pos else np.zeros((self.n_rows, 0), bool)

    @property
    def has_missing(self) -> bool:
        return bool(self.missing_mask.any())

    def level_counts(self):
        return [len(lv) for lv in self.levels]

    def take(self, rows) -> "MixedDataset":
        rows = np.asarray(rows)
        return MixedDataset(
            columns=self.columns,
            numeric_values=self.numeric_values[rows],
            categorical_values=self.categorical_values[rows],
            levels=self.levels,
            missing_mask=self.missing_mask[rows],
        )

    def complete_cases(self) -> "MixedDataset":
        """Drop every row that has at least one missing cell."""
        keep = ~self.missing_mask.any(axis=1)
        if not keep.any():
            raise ValueError("no complete rows remain")
        return self.take(np.flatnonzero(keep))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedDataset):
            return NotImplemented
        return (
            self.columns == other.columns
            and self.levels == other.levels
            and np.array_equal(self.missing_mask, other.missing_mask)
            and np.array_equal(self.categorical_values, other.categorical_values)
            and np.array_equal(
                self.numeric_values[~self.numeric_mask],
                other.numeric_values[~other.numeric_mask],
            )
        )


def from_arrays(numeric, categorical_labels=None, numeric_names=None, cat_names=None):
    """Build a complete-case MixedDataset from plain arrays.

    ``categorical_labels`` holds raw label strings (or any hashable); level
    lists are sorted lexicographically like the CSV loader does.
    """
    numeric = np.atleast_2d(np.asarray(numeric, dtype=float))
    n = numeric.shape[0]
    if categorical_labels is None:
        categorical_labels = np.empty((n, 0), dtype=object)
    cats = np.asarray(categorical_labels, dtype=object)
    if cats.ndim == 1:
        cats = cats.reshape(n, -1)
    p, q = numeric.shape[1], cats.shape[1]
    numeric_names = numeric_names or [f"num_{j}" for j in range(p)]
    cat_names = cat_names or [f"cat_{j}" for j in range(q)]
    levels, codes = [], np.zeros((n, q), dtype=int)
    for j in range(q):
        lv = sorted({str(v) for v in cats[:, j]})
        lut = {l: i for i, l in enumerate(lv)}
        codes[:, j] = [lut[str(v)] for v in cats[:, j]]
        levels.append(tuple(lv))
    columns = [(name, FeatureKind.NUMERICAL) for name in numeric_names]
    columns += [(name, FeatureKind.CATEGORICAL) for name in cat_names]
    return MixedDataset(
        columns=tuple(columns),
        numeric_values=numeric,
        categorical_values=codes,
        levels=tuple(levels),
        missing_mask=np.zeros((n, p + q), dtype=bool),
    )


def load_csv(path, schema=None) -> MixedDataset:
    """Read a comma-separated, headered, UTF-8 table into a MixedDataset.

    Without a schema, a column is Numerical when every non-missing cell parses
    as a real number, otherwise Categorical. Missing cells are "" or "NA".
    Level lists are sorted lexicographically for determinism.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if not body:
        raise ValueError(f"{path}: no data rows")
    width = len(header)
    for i, row in enumerate(body):
        if len(row) != width:
            raise ValueError(f"{path}: ragged row {i + 2} ({len(row)} cells, expected {width})")

    if schema is not None:
        if [name for name, _ in schema] != header:
            raise ValueError(f"{path}: schema names do not match header")
        kinds = [kind for _, kind in schema]
    else:
        kinds = []
        for j in range(width):
            cells = [r[j] for r in body if r[j] not in MISSING_TOKENS]
            numeric = bool(cells) and all(_parses_real(c) for c in cells)
            kinds.append(FeatureKind.NUMERICAL if numeric else FeatureKind.CATEGORICAL)

    n = len(body)
    missing = np.zeros((n, width), dtype=bool)
    num_cols, cat_cols, levels = [], [], []
    for j, kind in enumerate(kinds):
        raw = [r[j] for r in body]
        miss = np.array([c in MISSING_TOKENS for c in raw])
        missing[:, j] = miss
        if kind is FeatureKind.NUMERICAL:
            col = np.full(n, np.nan)
            for i, c in enumerate(raw):
                if not miss[i]:
                    col[i] = float(c)
            num_cols.append(col)
        else:
            lv = sorted({c for i, c in enumerate(raw) if not miss[i]})
            lut = {l: i for i, l in enumerate(lv)}
            col = np.array([MISSING_LEVEL if miss[i] else lut[c] for i, c in enumerate(raw)])
            cat_cols.append(col)
            levels.append(tuple(lv))

    return MixedDataset(
        columns=tuple(zip(header, kinds)),
        numeric_values=np.column_stack(num_cols) if num_cols else np.zeros((n, 0)),
        categorical_values=np.column_stack(cat_cols) if cat_cols else np.zeros((n, 0), int),
        levels=tuple(levels),
        missing_mask=missing,
    )


def save_csv(d: MixedDataset, path) -> None:
    """Write the dataset back out so load_csv(save_csv(d)) == d."""
    num_pos, cat_pos = d._block_column_order()
    place = {}
    for b, j in enumerate(num_pos):
        place[j] = ("num", b)
    for b, j in enumerate(cat_pos):
        place[j] = ("cat", b)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([name for name, _ in d.columns])
        for i in range(d.n_rows):
            row = []
            for j in range(len(d.columns)):
                if d.missing_mask[i, j]:
                    row.append("")
                    continue
                block, b = place[j]
                if block == "num":
                    row.append(repr(float(d.numeric_values[i, b])))
                else:
                    row.append(d.levels[b][d.categorical_values[i, b]])
            writer.writerow(row)


def standardize(d: MixedDataset) -> MixedDataset:
    """Z-score numerical columns (population sigma); zero-variance columns
    become all zeros. Categorical columns pass through untouched."""
    if d.n_numeric < 1:
        raise ValueError("standardize requires at least one numerical column")
    X = d.numeric_values.copy()
    mask = d.numeric_mask
    for j in range(X.shape[1]):
        vals = X[~mask[:, j], j]
        mu, sd = vals.mean(), vals.std()
        if sd == 0:
            X[~mask[:, j], j] = 0.0
        else:
            X[~mask[:, j], j] = (vals - mu) / sd
    return MixedDataset(
        columns=d.columns,
        numeric_values=X,
        categorical_values=d.categorical_values,
        levels=d.levels,
        missing_mask=d.missing_mask,
    )


@dataclass(frozen=True)
class GeneratorConfig:
    """Synthetic mixture settings; serializable as the [generate] INI section."""

    n_samples: int
    k_clusters: int
    n_numeric: int
    n_categorical: int
    cat_levels: int = 3
    cluster_std: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("samples must be >= 1")
        if self.k_clusters < 1:
            raise ValueError("clusters must be >= 1")
        if self.n_numeric + self.n_categorical == 0:
            raise ValueError("numeric + categorical must be >= 1")
        if self.n_categorical > 0 and self.cat_levels < 2:
            raise ValueError("levels must be >= 2 when categorical columns exist")
        if self.cluster_std < 0:
            raise ValueError("std must be >= 0")

    INI_KEYS = (
        ("samples", "n_samples", int),
        ("clusters", "k_clusters", int),
        ("numeric", "n_numeric", int),
        ("categorical", "n_categorical", int),
        ("levels", "cat_levels", int),
        ("std", "cluster_std", float),
        ("seed", "rng_seed", int),
    )

    @classmethod
    def from_ini_section(cls, section) -> "GeneratorConfig":
        kwargs = {}
        for key, attr, cast in cls.INI_KEYS:
            if key in section:
                kwargs[attr] = cast(section[key])
        return cls(**kwargs)

    def to_ini_section(self) -> dict:
        return {key: str(getattr(self, attr)) for key, attr, _ in self.INI_KEYS}


@dataclass(frozen=True)
class LabeledDataset:
    data: MixedDataset
    truth: np.ndarray

    def __post_init__(self):
        if len(self.truth) != self.data.n_rows:
            raise ValueError("truth length must equal n_rows")


def _level_labels(count: int):
    width = len(str(count - 1))
    return tuple(f"l{i:0{width}d}" for i in range(count))


def generate(cfg: GeneratorConfig) -> LabeledDataset:
    """Draw a labeled sample from a k-component isotropic Gaussian mixture.

    Centers are i.i.d. uniform in [0,1]^(P+Q), rescaled so the mean pairwise
    center distance is exactly 1.0, and the last Q raw dimensions are
    discretized into equal-probability levels by pooled quantile cuts. The
    generating component index is kept as ground truth.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    d_total = cfg.n_numeric + cfg.n_categorical
    centers = rng.uniform(0.0, 1.0, size=(cfg.k_clusters, d_total))
    if cfg.k_clusters > 1:
        diffs = centers[:, None, :] - centers[None, :, :]
        dists = np.sqrt((diffs**2).sum(-1))
        mean_pair = dists[np.triu_indices(cfg.k_clusters, k=1)].mean()
        if mean_pair > 0:
            centers = centers / mean_pair
    truth = rng.integers(0, cfg.k_clusters, size=cfg.n_samples)
    raw = centers[truth] + cfg.cluster_std * rng.standard_normal((cfg.n_samples, d_total))

    numeric = raw[:, : cfg.n_numeric]
    labels = _level_labels(cfg.cat_levels)
    cat_labels = np.empty((cfg.n_samples, cfg.n_categorical), dtype=object)
    for q in range(cfg.n_categorical):
        col = raw[:, cfg.n_numeric + q]
        probs = [j / cfg.cat_levels for j in range(1, cfg.cat_levels)]
        cuts = np.quantile(col, probs)
        idx = np.searchsorted(cuts, col, side="right")
        cat_labels[:, q] = [labels[i] for i in idx]

    data = from_arrays(
        numeric,
        cat_labels if cfg.n_categorical else None,
        numeric_names=[f"num_{j}" for j in range(cfg.n_numeric)],
        cat_names=[f"cat_{j}" for j in range(cfg.n_categorical)],
    )
    return LabeledDataset(data=data, truth=truth)
