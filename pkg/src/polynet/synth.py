"""Synthetic data with planted polynomial-network ground truth.

Stands in for the unavailable clinical recordings: a known network
generates clean outputs from i.i.d. standard-normal features, labels
come from thresholding the clean output, and a configurable noise family
(Gaussian, Laplace, or Student-t) corrupts the regression target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureTable
from .fitting import DesignPair, expand_design
from .model import InputRef, Neuron, PolyNetwork, Weights4, eval_network_batch

__all__ = [
    "NoiseSpec",
    "SynthSpec",
    "SynthResult",
    "SynthError",
    "gen_dataset",
    "planted_paper_models",
    "alzheimer_model",
    "sleep_model",
    "standard_neuron_task",
]


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseSpec:
    family: str = "gaussian"  # "gaussian" | "laplace" | "student-t"
    scale: float = 0.1
    df: float = 3.0  # student-t only

    def __post_init__(self):
        if self.family not in ("gaussian", "laplace", "student-t"):
            raise SynthError(f"unknown noise family {self.family!r}")
        if not self.scale > 0:
            raise SynthError("noise scale must be > 0")
        if self.family == "student-t" and not self.df > 0:
            raise SynthError("student-t df must be > 0")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.family == "gaussian":
            return rng.normal(0.0, self.scale, n)
        if self.family == "laplace":
            return rng.laplace(0.0, self.scale, n)
        return self.scale * rng.standard_t(self.df, n)


@dataclass(frozen=True)
class SynthSpec:
    generator: PolyNetwork
    m_total: int
    n_rows: int
    noise: NoiseSpec = NoiseSpec()
    label_threshold: float | str = "median"  # real or "median" of clean outputs
    seed: int = 0

    def __post_init__(self):
        if self.m_total < self.generator.m:
            raise SynthError(
                f"m_total {self.m_total} < generator feature count {self.generator.m}"
            )
        if self.n_rows < 1:
            raise SynthError("n_rows must be >= 1")


@dataclass
class SynthResult:
    table: FeatureTable  # X plus binary labels in y
    clean: np.ndarray  # noise-free generator outputs
    noisy: np.ndarray  # clean + noise (regression target)
    threshold: float  # resolved label threshold

    def regression_table(self) -> FeatureTable:
        return FeatureTable(
            feature_names=list(self.table.feature_names),
            X=self.table.X,
            y=self.noisy,
        )


def gen_dataset(spec: SynthSpec) -> SynthResult:
    """Draw features, evaluate the planted generator, attach labels/noise."""
    rng = np.random.default_rng(spec.seed)
    X = rng.standard_normal((spec.n_rows, spec.m_total))
    clean = eval_network_batch(spec.generator, X[:, : spec.generator.m])
    noisy = clean + spec.noise.sample(rng, spec.n_rows)
    thr = (
        float(np.median(clean))
        if spec.label_threshold == "median"
        else float(spec.label_threshold)
    )
    labels = (clean >= thr).astype(float)
    names = list(spec.generator.feature_names) + [
        f"d{i+1}" for i in range(spec.m_total - spec.generator.m)
    ]
    table = FeatureTable(feature_names=names, X=X, y=labels)
    return SynthResult(table=table, clean=clean, noisy=noisy, threshold=thr)


def alzheimer_model() -> PolyNetwork:
    """The printed 3-polynomial chain over the 76-feature layout.

    Inputs x11 (delta C11) and x69, x73, x76 (beta C12, C16, C19); the
    76 features are band-major: delta 1-19, theta 20-38, alpha 39-57,
    beta 58-76.
    """
    neurons = (
        Neuron(
            inputs=(InputRef.feature(10), InputRef.feature(68)),
            weights=Weights4(0.696, 0.391, 0.248, -0.231),
            layer=1,
        ),
        Neuron(
            inputs=(InputRef.neuron(0), InputRef.feature(72)),
            weights=Weights4(0.386, 0.564, 0.542, -0.485),
            layer=2,
        ),
        Neuron(
            inputs=(InputRef.neuron(1), InputRef.feature(75)),
            weights=Weights4(0.191, 0.776, 0.238, -0.204),
            layer=3,
        ),
    )
    return PolyNetwork(
        m=76,
        feature_names=tuple(f"x{i+1}" for i in range(76)),
        neurons=neurons,
        output=2,
    )


def _sleep_feature_names() -> tuple:
    bands = ("Subdelta", "Delta", "Theta", "Alpha", "Beta1", "Beta2")
    chans = ("C3", "C4", "")
    abs_cols = [f"AbsPow{b}{c}" for b in bands for c in chans]
    rel_cols = [f"RelPow{b}{c}" for b in bands for c in chans]
    return tuple(abs_cols + rel_cols)


def sleep_model() -> PolyNetwork:
    """The printed 7-polynomial artifact-recognition network (36 features)."""
    names = _sleep_feature_names()
    idx = {name: i for i, name in enumerate(names)}
    f = InputRef.feature
    n = InputRef.neuron
    neurons = (
        Neuron((f(idx["AbsPowThetaC4"]), f(idx["RelPowThetaC4"])),
               Weights4(0.947, -0.087, 0.073, 0.070), layer=1),
        Neuron((f(idx["AbsPowSubdeltaC3"]), f(idx["RelPowBeta2C3"])),
               Weights4(0.933, -0.131, -0.066, -0.065), layer=1),
        Neuron((f(idx["AbsPowSubdeltaC4"]), f(idx["RelPowTheta"])),
               Weights4(0.932, -0.204, -0.008, 0.003), layer=1),
        Neuron((f(idx["AbsPowAlpha"]), f(idx["RelPowAlphaC4"])),
               Weights4(0.929, -0.193, 0.034, 0.036), layer=1),
        Neuron((n(0), n(1)), Weights4(0.189, -0.595, 0.666, 0.764), layer=2),
        Neuron((n(2), n(3)), Weights4(0.250, -0.003, -0.540, 1.331), layer=2),
        Neuron((n(4), n(5)), Weights4(0.282, -0.104, 0.045, 0.783), layer=3),
    )
    return PolyNetwork(m=36, feature_names=names, neurons=neurons, output=6)


def planted_paper_models() -> list:
    return [alzheimer_model(), sleep_model()]


def recovery_model() -> PolyNetwork:
    """A depth-3 generator with one dominant signal path.

    The first hidden neuron carries almost all of the variance and each
    later neuron mixes it with low-amplitude side channels, so incremental
    growth can rediscover the structure one accepted neuron at a time.
    """
    f = InputRef.feature
    n = InputRef.neuron
    neurons = (
        Neuron((f(0), f(1)), Weights4(0.0, 1.0, 0.12, 0.08), layer=1),
        Neuron((f(2), f(3)), Weights4(0.0, 0.05, 0.05, 0.02), layer=1),
        Neuron((f(4), f(5)), Weights4(0.0, 0.05, -0.05, 0.02), layer=1),
        Neuron((f(6), f(7)), Weights4(0.0, -0.05, 0.05, -0.02), layer=1),
        Neuron((n(0), n(1)), Weights4(0.0, 1.0, 0.5, 0.0), layer=2),
        Neuron((n(2), n(3)), Weights4(0.0, 0.5, 0.5, 0.2), layer=2),
        Neuron((n(4), n(5)), Weights4(0.0, 1.0, 0.5, 0.0), layer=3),
    )
    return PolyNetwork(m=8, feature_names=tuple(f"x{i + 1}" for i in range(8)),
                       neurons=neurons, output=6)


STANDARD_W = (0.3, -0.2, 0.5, 0.1)


def standard_neuron_task(
    seed: int,
    n: int = 500,
    noise: NoiseSpec = NoiseSpec(family="gaussian", scale=0.1),
    split_ratio: float = 0.5,
    w_star=STANDARD_W,
) -> DesignPair:
    """The single-neuron synthetic task used by the convergence studies."""
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n, 2))
    y = expand_design(U) @ np.asarray(w_star, dtype=float)
    y = y + noise.sample(rng, n)
    n_b = int(round(n * split_ratio))
    if not 0 < n_b < n:
        raise SynthError("split leaves an empty side")
    return DesignPair(U_A=U[n_b:], y_A=y[n_b:], U_B=U[:n_b], y_B=y[:n_b])
