"""Feature tables and train/validation splitting."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["FeatureTable", "DataError", "split_indices", "read_feature_csv", "write_feature_csv"]


class DataError(ValueError):
    pass


@dataclass
class FeatureTable:
    """Rows of named numeric features plus a target vector.

    ``y`` is the regression/classification target; for classification it
    holds 0/1 labels.  ``y`` may be None for unlabeled tables.
    """

    feature_names: list
    X: np.ndarray
    y: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim != 2:
            raise DataError(f"X must be 2-D, got shape {self.X.shape}")
        if len(self.feature_names) != self.X.shape[1]:
            raise DataError("feature_names length != number of columns")
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=float)
            if len(self.y) != len(self.X):
                raise DataError("y length != number of rows")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def require_binary_labels(self) -> np.ndarray:
        if self.y is None:
            raise DataError("table has no label column")
        if not np.all(np.isin(self.y, (0.0, 1.0))):
            raise DataError("labels must be binary 0/1")
        return self.y


def split_indices(
    n: int,
    split_ratio: float,
    seed: int,
    labels: np.ndarray | None = None,
    mode: str = "stratified",
) -> tuple[np.ndarray, np.ndarray]:
    """Partition row indices into training (A) and validation (B) sets.

    ``split_ratio`` is the validation fraction n_B/n.  ``stratified``
    draws a seeded random split balanced per label; ``interleaved``
    alternates rows deterministically (every second row to B at ratio
    0.5, generalized by index striding).
    """
    if not 0 < split_ratio < 1:
        raise DataError(f"split_ratio must be in (0, 1), got {split_ratio}")
    if n < 2:
        raise DataError("need at least 2 rows to split")
    if mode == "interleaved":
        idx = np.arange(n)
        # rows whose fractional position crosses the ratio boundary go to B
        marks = np.floor((idx + 1) * split_ratio) - np.floor(idx * split_ratio)
        b_mask = marks > 0
    elif mode == "stratified":
        rng = np.random.default_rng(seed)
        b_mask = np.zeros(n, dtype=bool)
        groups = (
            [np.arange(n)]
            if labels is None
            else [np.flatnonzero(labels == v) for v in np.unique(labels)]
        )
        for grp in groups:
            perm = rng.permutation(grp)
            n_b = int(round(len(grp) * split_ratio))
            b_mask[perm[:n_b]] = True
    else:
        raise DataError(f"unknown split mode {mode!r}")
    idx_b = np.flatnonzero(b_mask)
    idx_a = np.flatnonzero(~b_mask)
    if len(idx_a) == 0 or len(idx_b) == 0:
        raise DataError("split produced an empty side; adjust split_ratio")
    return idx_a, idx_b


def write_feature_csv(path, table: FeatureTable) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = list(table.feature_names)
        if table.y is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(table.n):
            row = [repr(float(v)) for v in table.X[i]]
            if table.y is not None:
                label = table.y[i]
                row.append(str(int(label)) if label == int(label) else repr(float(label)))
            writer.writerow(row)


def read_feature_csv(path) -> FeatureTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    has_label = bool(header) and header[-1] == "label"
    names = header[:-1] if has_label else list(header)
    if not names:
        raise DataError(f"{path}: no feature columns")
    X = []
    y = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: line {lineno}: expected {len(header)} fields")
        try:
            vals = [float(v) for v in row]
        except ValueError:
            raise DataError(f"{path}: line {lineno}: non-numeric value") from None
        if has_label:
            X.append(vals[:-1])
            y.append(vals[-1])
        else:
            X.append(vals)
    return FeatureTable(
        feature_names=names,
        X=np.array(X, dtype=float),
        y=np.array(y, dtype=float) if has_label else None,
    )
