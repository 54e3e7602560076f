"""Dataset containers and labeled-CSV ingestion.

Layout convention: a feature matrix has one row per feature and one column
per instance (CSV files are the transpose, instances as rows). Feature
indices exposed by this package are 1-based, matching report conventions;
label codes are 1..c in first-appearance order.
"""

import csv
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    """Invalid dataset content or structure."""


class MissingColumnError(DatasetError):
    pass


class NonNumericCellError(DatasetError):
    def __init__(self, row, column, text):
        self.row = row
        self.column = column
        super().__init__(
            f"non-numeric value {text!r} at data row {row}, column {column!r}"
        )


class TooFewInstancesError(DatasetError):
    pass


class NoFeaturesError(DatasetError):
    pass


@dataclass
class FeatureMatrix:
    """Dense feature-by-instance matrix with per-feature names.

    Parameters
    ----------
    values : ndarray, shape (n_features, n_instances)
        Finite float values; one row per feature.
    feature_names : list of str, optional
        Unique names, one per row. Defaults to f1..fm.
    """

    values: np.ndarray
    feature_names: list = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("feature matrix must be 2-D and nonempty")
        if not np.isfinite(self.values).all():
            raise ValueError("feature matrix contains non-finite values")
        if self.feature_names is None:
            self.feature_names = [f"f{j}" for j in range(1, self.values.shape[0] + 1)]
        self.feature_names = list(self.feature_names)
        if len(self.feature_names) != self.values.shape[0]:
            raise ValueError("feature_names length does not match row count")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names must be unique")

    @property
    def n_features(self):
        return self.values.shape[0]

    @property
    def n_instances(self):
        return self.values.shape[1]

    def row(self, index):
        """Feature row by 1-based index."""
        if not 1 <= index <= self.n_features:
            raise IndexError(f"feature index {index} out of range 1..{self.n_features}")
        return self.values[index - 1]

    def restrict(self, indices):
        """New matrix keeping only the given 1-based feature indices, in order."""
        rows = [self.row(i) for i in indices]
        names = [self.feature_names[i - 1] for i in indices]
        return FeatureMatrix(np.array(rows), names)


@dataclass
class LabelVector:
    """Per-instance class labels as 1..c codes plus the original strings."""

    codes: np.ndarray
    class_names: list

    def __post_init__(self):
        self.codes = np.asarray(self.codes, dtype=np.int64)
        if self.codes.ndim != 1 or self.codes.size == 0:
            raise ValueError("labels must be a nonempty vector")
        c = len(self.class_names)
        if c < 1 or self.codes.min() < 1 or self.codes.max() > c:
            raise ValueError("label codes must lie in 1..c")
        if np.unique(self.codes).size != c:
            raise ValueError("every class must occur at least once")

    @classmethod
    def from_strings(cls, raw):
        """Encode raw label strings by first appearance (codes 1..c)."""
        seen = {}
        codes = np.empty(len(raw), dtype=np.int64)
        for i, s in enumerate(raw):
            if s not in seen:
                seen[s] = len(seen) + 1
            codes[i] = seen[s]
        return cls(codes, list(seen))

    @property
    def n(self):
        return self.codes.size

    @property
    def n_classes(self):
        return len(self.class_names)

    @property
    def class_counts(self):
        return np.bincount(self.codes, minlength=self.n_classes + 1)[1:]


@dataclass
class Dataset:
    """A loaded CSV: features, labels, and provenance for reports."""

    features: FeatureMatrix
    labels: LabelVector
    dropped_features: list = field(default_factory=list)
    source_path: str = ""
    sha256: str = ""
    label_column: str = "label"

    def __post_init__(self):
        if self.features.n_instances != self.labels.n:
            raise ValueError("feature and label instance counts differ")
        if set(self.dropped_features) & set(self.features.feature_names):
            raise ValueError("dropped features overlap surviving features")


def one_hot(labels):
    """Class label matrix Y, shape (c, n); column i is the basis vector of code i.

    >>> one_hot(LabelVector(np.array([1, 2, 1]), ["a", "b"]))
    array([[1., 0., 1.],
           [0., 1., 0.]])
    """
    y = np.zeros((labels.n_classes, labels.n))
    y[labels.codes - 1, np.arange(labels.n)] = 1.0
    return y


def _parse_cell(text, row, column):
    try:
        value = float(text)
    except ValueError:
        raise NonNumericCellError(row, column, text) from None
    if not math.isfinite(value):
        raise NonNumericCellError(row, column, text)
    return value


def load_csv(path, label_column, variance_floor=0.0):
    """Load a labeled CSV into a Dataset.

    The CSV must have a header row; ``label_column`` holds the class labels
    and every other cell must be numeric (UTF-8, '.' decimals, scientific
    notation accepted). Features whose sample variance is <= variance_floor
    (default: exactly constant) are dropped and recorded.

    Raises FileNotFoundError, MissingColumnError, NonNumericCellError,
    TooFewInstancesError, or NoFeaturesError.
    """
    if variance_floor < 0:
        raise ValueError("variance_floor must be >= 0")
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()

    reader = csv.reader(raw.decode("utf-8").splitlines())
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DatasetError(f"{path}: empty file") from None
    if label_column not in header:
        raise MissingColumnError(f"label column {label_column!r} not in header {header}")
    label_idx = header.index(label_column)
    feature_cols = [h for i, h in enumerate(header) if i != label_idx]

    rows = []
    raw_labels = []
    for r, record in enumerate(reader, start=1):
        if not record:
            continue
        if len(record) != len(header):
            raise DatasetError(f"{path}: data row {r} has {len(record)} cells, expected {len(header)}")
        raw_labels.append(record[label_idx].strip())
        rows.append(
            [
                _parse_cell(cell.strip(), r, header[i])
                for i, cell in enumerate(record)
                if i != label_idx
            ]
        )
    if len(rows) < 2:
        raise TooFewInstancesError(f"{path}: need at least 2 instances, found {len(rows)}")

    columns = np.array(rows, dtype=np.float64).T  # features as rows
    variances = columns.var(axis=1)
    constant = columns.max(axis=1) == columns.min(axis=1)
    variances[constant] = 0.0
    keep = variances > variance_floor
    dropped = [name for name, k in zip(feature_cols, keep) if not k]
    if not keep.any():
        raise NoFeaturesError(f"{path}: no features survive the variance floor")

    features = FeatureMatrix(columns[keep], [n for n, k in zip(feature_cols, keep) if k])
    labels = LabelVector.from_strings(raw_labels)
    return Dataset(features, labels, dropped, str(path), digest, label_column)


def write_csv(dataset, path):
    """Write a Dataset back to CSV (instances as rows, label column last).

    Values are written with repr so a reload round-trips exactly.
    """
    names = dataset.features.feature_names + [dataset.label_column]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(dataset.features.n_instances):
            cells = [repr(float(v)) for v in dataset.features.values[:, i]]
            cells.append(dataset.labels.class_names[dataset.labels.codes[i] - 1])
            writer.writerow(cells)
