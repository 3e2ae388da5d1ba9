"""Dataset ingestion, normalization, correlation ranking and fold planning.

The expected input is a comma-separated UTF-8 table of numeric feature
columns (categoricals pre-coded as integers) plus one binary label column.
Normalization is per-feature min-max scaling into [0, 1], computed over the
full dataset before any fold split; the stored parameters allow exact
denormalization of non-constant features.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DatasetError

PASS, FAIL = 1, 0

_DEFAULT_POSITIVE = ("1", "pass")
_DEFAULT_NEGATIVE = ("0", "fail")


@dataclass(frozen=True)
class LoadSchema:
    """How to read a CSV: header presence, label column, and label spelling.

    ``label_column`` may be a header name or a 0-based index; ``None`` means
    the last column.  ``positive_label`` overrides the default pass spelling,
    in which case the (single) other observed value is treated as fail.
    """

    has_header: bool = True
    label_column: Union[str, int, None] = None
    positive_label: Optional[str] = None


@dataclass
class Sample:
    features: np.ndarray
    label: int


@dataclass
class RawDataset:
    """Parsed but not yet normalized rows."""

    feature_names: list
    rows: np.ndarray  # (n, features) raw values
    labels: np.ndarray  # (n,) of PASS/FAIL

    def __len__(self):
        return len(self.labels)


@dataclass
class Dataset:
    """Normalized samples plus the scaling parameters that produced them."""

    feature_names: list
    features: np.ndarray  # (n, f), every value in [0, 1]
    labels: np.ndarray  # (n,)
    norm_min: np.ndarray
    norm_max: np.ndarray

    def __len__(self):
        return len(self.labels)

    @property
    def samples(self) -> list:
        return [Sample(self.features[i], int(self.labels[i])) for i in range(len(self))]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(
            self.feature_names,
            self.features[indices],
            self.labels[indices],
            self.norm_min,
            self.norm_max,
        )


def _resolve_label_index(names_or_width, schema: LoadSchema, width: int) -> int:
    col = schema.label_column
    if col is None:
        return width - 1
    if isinstance(col, int):
        if not 0 <= col < width:
            raise DatasetError(f"label column index {col} outside 0..{width - 1}")
        return col
    if isinstance(names_or_width, list) and col in names_or_width:
        return names_or_width.index(col)
    raise DatasetError(f"label column {col!r} not found in header")


def _parse_labels(raw_labels, schema: LoadSchema) -> np.ndarray:
    labels = np.empty(len(raw_labels), dtype=int)
    if schema.positive_label is not None:
        positive = schema.positive_label.strip().lower()
        others = {v.strip().lower() for v in raw_labels} - {positive}
        if positive not in {v.strip().lower() for v in raw_labels}:
            raise DatasetError(f"positive label {schema.positive_label!r} never occurs")
        if len(others) > 1:
            raise DatasetError(
                f"expected one non-positive label value, found {sorted(others)}"
            )
        for i, v in enumerate(raw_labels):
            labels[i] = PASS if v.strip().lower() == positive else FAIL
        return labels
    for i, v in enumerate(raw_labels):
        text = v.strip().lower()
        if text in _DEFAULT_POSITIVE:
            labels[i] = PASS
        elif text in _DEFAULT_NEGATIVE:
            labels[i] = FAIL
        else:
            raise DatasetError(
                f"unknown label value {v!r} (expected one of "
                f"{_DEFAULT_POSITIVE + _DEFAULT_NEGATIVE}, or set a positive label)"
            )
    return labels


def load_csv(path, schema: LoadSchema = LoadSchema()) -> RawDataset:
    """Parse a CSV into features and binary labels.

    Raises :class:`DatasetError` naming the line for ragged rows, unparseable
    numeric cells, and unknown label values.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        raise DatasetError(f"{path}: empty file")

    if schema.has_header:
        header = [c.strip() for c in rows[0][1]]
        body = rows[1:]
    else:
        header = None
        body = rows
    if not body:
        raise DatasetError(f"{path}: no data rows")

    width = len(body[0][1])
    label_idx = _resolve_label_index(header, schema, width)
    if header is None:
        feature_names = [f"f{j}" for j in range(width) if j != label_idx]
    else:
        if len(header) != width:
            raise DatasetError(f"{path}: header has {len(header)} columns, rows have {width}")
        feature_names = [n for j, n in enumerate(header) if j != label_idx]

    values = np.empty((len(body), width - 1))
    raw_labels = []
    for r, (lineno, row) in enumerate(body):
        if len(row) != width:
            raise DatasetError(
                f"{path}:{lineno}: expected {width} columns, found {len(row)}"
            )
        raw_labels.append(row[label_idx])
        k = 0
        for j, cell in enumerate(row):
            if j == label_idx:
                continue
            try:
                values[r, k] = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}:{lineno}: column {feature_names[k]!r}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
            k += 1
    labels = _parse_labels(raw_labels, schema)
    return RawDataset(feature_names, values, labels)


def normalize(raw: RawDataset) -> Dataset:
    """Min-max scale every feature into [0, 1]; constant features map to 0."""
    lo = raw.rows.min(axis=0)
    hi = raw.rows.max(axis=0)
    span = hi - lo
    scaled = np.zeros_like(raw.rows, dtype=float)
    varying = span > 0
    scaled[:, varying] = (raw.rows[:, varying] - lo[varying]) / span[varying]
    return Dataset(list(raw.feature_names), scaled, raw.labels.copy(), lo, hi)


def denormalize(dataset: Dataset) -> np.ndarray:
    """Recover raw feature values from the stored scaling parameters.

    Constant features come back at their (single) original value.
    """
    span = dataset.norm_max - dataset.norm_min
    return dataset.features * span + dataset.norm_min


@dataclass(frozen=True)
class FeatureCorrelation:
    name: str
    pearson_r: float
    abs_rank: int  # 1-based, by |r| descending, ties by column order
    constant: bool
    dropped: bool


@dataclass
class FeatureReport:
    entries: list  # of FeatureCorrelation, in rank order

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["feature", "pearson_r", "abs_rank", "dropped"])
        for e in self.entries:
            writer.writerow([e.name, repr(e.pearson_r), e.abs_rank, int(e.dropped)])
        return buf.getvalue()


def correlation_rank(dataset: Dataset, drop: Sequence[str] = ()) -> FeatureReport:
    """Pearson correlation of each feature against the 0/1 label, ranked by |r|.

    Zero-variance features (or a single-class label) get r = 0 and a constant
    flag rather than an error, so the ranking is always total.
    """
    n = len(dataset)
    if n < 2:
        raise DatasetError("correlation needs at least two samples")
    unknown = set(drop) - set(dataset.feature_names)
    if unknown:
        raise DatasetError(f"unknown feature name(s) in drop list: {sorted(unknown)}")

    y = dataset.labels.astype(float)
    y_centered = y - y.mean()
    y_ss = float(y_centered @ y_centered)
    correlations = []
    for j, name in enumerate(dataset.feature_names):
        x = dataset.features[:, j]
        x_centered = x - x.mean()
        x_ss = float(x_centered @ x_centered)
        constant = x_ss == 0.0 or y_ss == 0.0
        r = 0.0 if constant else float(x_centered @ y_centered) / np.sqrt(x_ss * y_ss)
        correlations.append((j, name, r, constant))

    order = sorted(correlations, key=lambda t: (-abs(t[2]), t[0]))
    entries = [
        FeatureCorrelation(name, r, rank, constant, name in set(drop))
        for rank, (j, name, r, constant) in enumerate(order, start=1)
    ]
    return FeatureReport(entries)


def select_features(dataset, drop: Sequence[str]):
    """Remove the named feature columns; unknown names are an error.

    Works on both raw and normalized datasets and returns the same type.
    """
    drop = list(drop)
    unknown = set(drop) - set(dataset.feature_names)
    if unknown:
        raise DatasetError(f"unknown feature name(s): {sorted(unknown)}")
    keep = [j for j, n in enumerate(dataset.feature_names) if n not in set(drop)]
    if not keep:
        raise DatasetError("cannot drop every feature")
    names = [dataset.feature_names[j] for j in keep]
    if isinstance(dataset, RawDataset):
        return RawDataset(names, dataset.rows[:, keep], dataset.labels.copy())
    return Dataset(
        names,
        dataset.features[:, keep],
        dataset.labels.copy(),
        dataset.norm_min[keep],
        dataset.norm_max[keep],
    )


@dataclass
class FoldPlan:
    """Assignment of every sample index to one of k folds."""

    k: int
    assignment: np.ndarray  # (n,) fold index per sample

    def __len__(self):
        return len(self.assignment)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != fold)

    def fold_sizes(self) -> list:
        return [int(np.sum(self.assignment == f)) for f in range(self.k)]

    def to_csv(self) -> str:
        lines = ["sample_index,fold"]
        lines += [f"{i},{int(f)}" for i, f in enumerate(self.assignment)]
        return "\n".join(lines) + "\n"


def stratified_folds(dataset: Dataset, k: int, seed: int) -> FoldPlan:
    """Class-balanced fold assignment.

    Within each class (pass first, then fail) the sample indices are shuffled
    by the seed and dealt round-robin; the dealing pointer carries over from
    one class to the next so total fold sizes also stay within one of each
    other.
    """
    if k < 2:
        raise DatasetError(f"need at least 2 folds, got {k}")
    labels = dataset.labels
    class_sizes = [int(np.sum(labels == c)) for c in (PASS, FAIL)]
    if k > min(class_sizes):
        raise DatasetError(
            f"{k} folds exceed the minority class size {min(class_sizes)}"
        )
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(labels), dtype=int)
    pointer = 0
    for cls in (PASS, FAIL):
        indices = np.flatnonzero(labels == cls)
        rng.shuffle(indices)
        for idx in indices:
            assignment[idx] = pointer % k
            pointer += 1
    return FoldPlan(k, assignment)
