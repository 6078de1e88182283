"""Polynomial network representation and evaluation.

A network is a DAG of two-input "supporting" neurons over a fixed list of
input features.  Each neuron computes the bilinear form

    y = w0 + w1*v1 + w2*v2 + w3*v1*v2

and the network output is the value of one designated neuron.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Weights4",
    "InputRef",
    "Neuron",
    "PolyNetwork",
    "NetworkError",
    "eval_transfer",
    "eval_network",
    "classify",
]


class NetworkError(ValueError):
    """Invalid network structure or input shape."""


@dataclass(frozen=True)
class Weights4:
    """The four coefficients of a supporting neuron."""

    w0: float
    w1: float
    w2: float
    w3: float

    def __post_init__(self):
        for name in ("w0", "w1", "w2", "w3"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise NetworkError(f"non-finite weight {name}={v!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.w0, self.w1, self.w2, self.w3], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Weights4":
        w0, w1, w2, w3 = (float(v) for v in a)
        return cls(w0, w1, w2, w3)


@dataclass(frozen=True)
class InputRef:
    """Reference to a neuron input: a raw feature or an earlier neuron."""

    kind: str  # "feature" | "neuron"
    index: int

    def __post_init__(self):
        if self.kind not in ("feature", "neuron"):
            raise NetworkError(f"bad InputRef kind {self.kind!r}")
        if self.index < 0:
            raise NetworkError(f"negative InputRef index {self.index}")

    @classmethod
    def feature(cls, index: int) -> "InputRef":
        return cls("feature", index)

    @classmethod
    def neuron(cls, index: int) -> "InputRef":
        return cls("neuron", index)


@dataclass(frozen=True)
class Neuron:
    inputs: tuple  # (InputRef, InputRef)
    weights: Weights4
    layer: int

    def __post_init__(self):
        a, b = self.inputs
        if a == b:
            raise NetworkError("neuron inputs must be distinct")
        if self.layer < 1:
            raise NetworkError("neuron layer must be >= 1")


@dataclass(frozen=True)
class PolyNetwork:
    """Immutable polynomial network.

    ``neurons`` is in topological order: a neuron may only reference
    features or neurons at smaller list indices.  ``norm_stats``, when
    present, holds per-feature (mean, std) pairs applied to raw inputs
    before evaluation.
    """

    m: int
    feature_names: tuple
    neurons: tuple
    output: int
    threshold: float = 0.5
    norm_stats: tuple | None = None  # per-feature (mean, std) or None

    def __post_init__(self):
        if self.m < 1:
            raise NetworkError("feature count must be >= 1")
        if len(self.feature_names) != self.m:
            raise NetworkError("feature_names length != m")
        if not self.neurons:
            raise NetworkError("network has no neurons")
        if not (0 <= self.output < len(self.neurons)):
            raise NetworkError(f"output index {self.output} out of range")
        if self.norm_stats is not None:
            if len(self.norm_stats) != self.m:
                raise NetworkError("norm_stats length != m")
            for i, (_, std) in enumerate(self.norm_stats):
                if not std > 0:
                    raise NetworkError(f"norm_stats std for feature {i} must be > 0")
        for j, neuron in enumerate(self.neurons):
            max_in_layer = 0
            for ref in neuron.inputs:
                if ref.kind == "feature":
                    if ref.index >= self.m:
                        raise NetworkError(
                            f"neuron {j} references feature {ref.index} >= m={self.m}"
                        )
                else:
                    if ref.index >= j:
                        raise NetworkError(
                            f"neuron {j} references neuron {ref.index} (not earlier)"
                        )
                    max_in_layer = max(max_in_layer, self.neurons[ref.index].layer)
            if neuron.layer <= max_in_layer:
                raise NetworkError(
                    f"neuron {j} layer {neuron.layer} not above its inputs"
                )

    @property
    def depth(self) -> int:
        return self.neurons[self.output].layer

    def input_feature_indices(self) -> set:
        """Feature indices reachable from the output neuron."""
        feats: set = set()
        stack = [self.output]
        seen = set()
        while stack:
            j = stack.pop()
            if j in seen:
                continue
            seen.add(j)
            for ref in self.neurons[j].inputs:
                if ref.kind == "feature":
                    feats.add(ref.index)
                else:
                    stack.append(ref.index)
        return feats

    def without_norm_stats(self) -> "PolyNetwork":
        return PolyNetwork(
            m=self.m,
            feature_names=self.feature_names,
            neurons=self.neurons,
            output=self.output,
            threshold=self.threshold,
            norm_stats=None,
        )


def eval_transfer(v1: float, v2: float, w: Weights4) -> float:
    # left-to-right summation, fixed for bitwise reproducibility
    return w.w0 + w.w1 * v1 + w.w2 * v2 + w.w3 * v1 * v2


def _check_input(net: PolyNetwork, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (net.m,):
        raise NetworkError(f"expected feature vector of length {net.m}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NetworkError("feature vector contains non-finite values")
    return x


def eval_network(net: PolyNetwork, x) -> float:
    """Evaluate the network on one raw feature vector."""
    x = _check_input(net, x)
    if net.norm_stats is not None:
        mean = np.array([s[0] for s in net.norm_stats])
        std = np.array([s[1] for s in net.norm_stats])
        x = (x - mean) / std
    values = np.empty(len(net.neurons))
    for j, neuron in enumerate(net.neurons):
        v = [0.0, 0.0]
        for i, ref in enumerate(neuron.inputs):
            v[i] = x[ref.index] if ref.kind == "feature" else values[ref.index]
        values[j] = eval_transfer(v[0], v[1], neuron.weights)
    return float(values[net.output])


def eval_network_batch(net: PolyNetwork, X) -> np.ndarray:
    """Evaluate the network on an (n, m) matrix of raw feature rows."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.m:
        raise NetworkError(f"expected (n, {net.m}) matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NetworkError("feature matrix contains non-finite values")
    if net.norm_stats is not None:
        mean = np.array([s[0] for s in net.norm_stats])
        std = np.array([s[1] for s in net.norm_stats])
        X = (X - mean) / std
    values = np.empty((X.shape[0], len(net.neurons)))
    for j, neuron in enumerate(net.neurons):
        cols = []
        for ref in neuron.inputs:
            cols.append(X[:, ref.index] if ref.kind == "feature" else values[:, ref.index])
        w = neuron.weights
        values[:, j] = w.w0 + w.w1 * cols[0] + w.w2 * cols[1] + w.w3 * cols[0] * cols[1]
    return values[:, net.output]


def classify(net: PolyNetwork, x) -> int:
    """Threshold the network output into a 0/1 label (output >= threshold -> 1)."""
    return int(eval_network(net, x) >= net.threshold)


def classify_batch(net: PolyNetwork, X) -> np.ndarray:
    return (eval_network_batch(net, X) >= net.threshold).astype(int)
