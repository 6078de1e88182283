"""Confusion-matrix metrics and repeated-run statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Confusion",
    "RunStats",
    "MetricError",
    "confusion",
    "sensitivity",
    "specificity",
    "performance",
    "repeated_runs",
]


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class Confusion:
    TP: int
    TN: int
    FP: int
    FN: int

    def __post_init__(self):
        if min(self.TP, self.TN, self.FP, self.FN) < 0:
            raise MetricError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.TP + self.TN + self.FP + self.FN


@dataclass(frozen=True)
class RunStats:
    mean: float
    half_width: float
    runs: int
    convention: str = "spread"  # "spread" (1.96*std) | "sem" (1.96*std/sqrt(R))
    values: tuple = ()


def confusion(labels, preds) -> Confusion:
    labels = np.asarray(labels)
    preds = np.asarray(preds)
    if labels.shape != preds.shape or labels.size == 0:
        raise MetricError("labels and predictions must have equal non-zero length")
    for name, arr in (("labels", labels), ("predictions", preds)):
        if not np.all(np.isin(arr, (0, 1))):
            raise MetricError(f"{name} must be binary 0/1")
    tp = int(np.sum((labels == 1) & (preds == 1)))
    tn = int(np.sum((labels == 0) & (preds == 0)))
    fp = int(np.sum((labels == 0) & (preds == 1)))
    fn = int(np.sum((labels == 1) & (preds == 0)))
    return Confusion(TP=tp, TN=tn, FP=fp, FN=fn)


def _ratio(num: int, den: int, what: str) -> float:
    if den == 0:
        raise MetricError(f"{what} undefined: zero denominator")
    return num / den


def sensitivity(c: Confusion) -> float:
    return _ratio(c.TP, c.TP + c.FN, "sensitivity")


def specificity(c: Confusion) -> float:
    return _ratio(c.TN, c.TN + c.FP, "specificity")


def performance(c: Confusion) -> float:
    return _ratio(c.TP + c.TN, c.total, "performance")


def repeated_runs(run, seeds, convention: str = "spread") -> RunStats:
    """Run a seeded experiment once per seed and summarize the metric.

    ``run(seed) -> float``.  The default half-width is 1.96 times the
    sample standard deviation of the run values (spread-of-runs band);
    ``convention="sem"`` divides by sqrt(R) instead.
    """
    seeds = list(seeds)
    if not seeds:
        raise MetricError("need at least one seed")
    if convention not in ("spread", "sem"):
        raise MetricError(f"unknown convention {convention!r}")
    values = []
    for seed in seeds:
        try:
            values.append(float(run(seed)))
        except Exception as exc:
            raise MetricError(f"run with seed {seed} failed: {exc}") from exc
    r = len(values)
    mean = float(np.mean(values))
    if r == 1:
        half = 0.0
    else:
        std = float(np.std(values, ddof=1))
        half = 1.96 * std
        if convention == "sem":
            half /= math.sqrt(r)
    return RunStats(mean=mean, half_width=half, runs=r, convention=convention, values=tuple(values))
