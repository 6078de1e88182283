"""Network construction: layered search and incremental random-pair search.

The layered strategy grows one layer at a time, fits every candidate
input pair, keeps the F best by the exterior criterion, and stops when
the layer-to-layer improvement of the minimal criterion falls below
Delta.  The incremental strategy draws random pairs from the whole pool
(features plus accepted neurons), accepts a new neuron only if it beats
both of its parents, and terminates after a fixed number of consecutive
failed attempts.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .data import FeatureTable, split_indices
from .fitting import (
    LS_DAMPING,
    DesignPair,
    FitParams,
    FitTrace,
    exterior_criterion,
    fit_least_squares,
    fit_projection,
)
from .model import InputRef, Neuron, PolyNetwork, Weights4

__all__ = [
    "GrowthParams",
    "Candidate",
    "GrowthTrace",
    "GrowthError",
    "default_F",
    "generate_layer_candidates",
    "select_best",
    "grow_layered",
    "grow_incremental",
    "grow",
]


class GrowthError(ValueError):
    pass


@dataclass(frozen=True)
class GrowthParams:
    strategy: str = "layered"  # "layered" | "incremental"
    F: int | None = None  # None -> default_F(m)
    Delta: float = 1e-4
    fail_budget: int = 7
    max_layers: int = 10
    seed: int = 0
    fitter: str = "projection"  # "projection" | "ls"
    split_mode: str = "stratified"  # "stratified" | "interleaved"

    def __post_init__(self):
        if self.strategy not in ("layered", "incremental"):
            raise GrowthError(f"unknown strategy {self.strategy!r}")
        if self.F is not None and self.F < 1:
            raise GrowthError("F must be >= 1")
        if not self.Delta > 0:
            raise GrowthError("Delta must be > 0")
        if self.fail_budget < 1:
            raise GrowthError("fail_budget must be >= 1")
        if self.max_layers < 1:
            raise GrowthError("max_layers must be >= 1")
        if self.fitter not in ("projection", "ls"):
            raise GrowthError(f"unknown fitter {self.fitter!r}")


@dataclass
class Candidate:
    inputs: tuple  # (InputRef, InputRef)
    weights: Weights4
    criterion: float
    creation_index: int
    layer: int = 1
    outputs: np.ndarray | None = None  # cached values over all n rows
    fit_trace: FitTrace | None = None


@dataclass
class GrowthTrace:
    strategy: str
    cr_per_layer: list = field(default_factory=list)  # layered: CR_m per layer
    final_layer: int = 0
    stop_reason: str = ""
    attempts: list = field(default_factory=list)  # incremental: per-attempt dicts
    fit_traces: list = field(default_factory=list)  # FitTrace per fitted candidate


def default_F(m: int) -> int:
    """Selection width heuristic: 0.4 * C(m, 2), clamped to at least 1."""
    if m < 2:
        raise GrowthError("need at least 2 features")
    return max(1, round(0.4 * m * (m - 1) / 2))


def generate_layer_candidates(pool: list) -> list:
    """All unordered distinct pairs of pool members, lexicographic order."""
    if len(pool) < 2:
        raise GrowthError("candidate pool needs at least 2 members")
    return [
        (pool[i], pool[j])
        for i in range(len(pool))
        for j in range(i + 1, len(pool))
    ]


def select_best(candidates: list, F: int) -> list:
    """The F smallest candidates by criterion; ties favor earlier creation."""
    if not candidates:
        raise GrowthError("no candidates to select from")
    ranked = sorted(candidates, key=lambda c: (c.criterion, c.creation_index))
    return ranked[: min(F, len(ranked))]


def _derive_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _fit_candidate(
    v1: np.ndarray,
    v2: np.ndarray,
    y: np.ndarray,
    idx_a: np.ndarray,
    idx_b: np.ndarray,
    f: FitParams,
    fitter: str,
    fit_seed: int,
) -> tuple[Weights4, FitTrace | None, np.ndarray, float]:
    """Fit one candidate pair; returns weights, trace, outputs on all n, CR."""
    U = np.column_stack([v1, v2])
    if fitter == "ls":
        w = fit_least_squares(U[idx_a], y[idx_a])
        trace = None
    else:
        pair = DesignPair(U[idx_a], y[idx_a], U[idx_b], y[idx_b])
        w, trace = fit_projection(pair, dataclasses.replace(f, seed=fit_seed))
    out = w.w0 + w.w1 * v1 + w.w2 * v2 + w.w3 * v1 * v2
    cr = exterior_criterion(out, y)
    return w, trace, out, cr


def _affine_criterion(x: np.ndarray, y: np.ndarray, idx_a: np.ndarray) -> float:
    """Exterior criterion of a damped univariate affine fit y ~ a + b*x."""
    phi = np.column_stack([np.ones(len(idx_a)), x[idx_a]])
    A = phi.T @ phi + LS_DAMPING * np.eye(2)
    a, b = np.linalg.solve(A, phi.T @ y[idx_a])
    return exterior_criterion(a + b * x, y)


def _prune_and_build(
    table: FeatureTable,
    neurons: list,  # list of (inputs: (InputRef, InputRef), Weights4, layer)
    output: int,
) -> PolyNetwork:
    reachable = set()
    stack = [output]
    while stack:
        j = stack.pop()
        if j in reachable:
            continue
        reachable.add(j)
        for ref in neurons[j][0]:
            if ref.kind == "neuron":
                stack.append(ref.index)
    keep = sorted(reachable)
    remap = {old: new for new, old in enumerate(keep)}
    pruned = []
    for old in keep:
        inputs, w, layer = neurons[old]
        new_inputs = tuple(
            ref if ref.kind == "feature" else InputRef.neuron(remap[ref.index])
            for ref in inputs
        )
        pruned.append(Neuron(inputs=new_inputs, weights=w, layer=layer))
    return PolyNetwork(
        m=table.m,
        feature_names=tuple(table.feature_names),
        neurons=tuple(pruned),
        output=remap[output],
    )


def grow_layered(
    data: FeatureTable, g: GrowthParams, f: FitParams
) -> tuple[PolyNetwork, GrowthTrace]:
    """Classic layer-by-layer growth with F-best selection.

    Layer 1 fits every feature pair.  Later layers pair the F survivors
    with each other and with the raw features (the pairing the induced
    models of the source domain actually use; with F=1 pure-survivor
    pairs do not exist).  Stops when |CR_m(r) - CR_m(r-1)| < Delta, the
    network then being the best neuron of layer r-1, or at the layer cap
    (best neuron of the last layer).
    """
    if data.n < 2:
        raise GrowthError("need at least 2 rows")
    if data.m < 2:
        raise GrowthError("need at least 2 features")
    y = data.require_binary_labels() if _labels_binary(data) else _require_targets(data)
    idx_a, idx_b = split_indices(
        data.n, f.split_ratio, g.seed, labels=y if _labels_binary(data) else None,
        mode=g.split_mode,
    )
    F = g.F if g.F is not None else default_F(data.m)

    trace = GrowthTrace(strategy="layered")
    all_neurons: list = []  # global (inputs, weights, layer)
    values: list = []  # outputs over all n rows, parallel to all_neurons
    creation_counter = 0

    feature_refs = [InputRef.feature(i) for i in range(data.m)]
    survivors: list = []  # Candidate objects of the previous layer
    survivor_best: list = []  # best candidate per layer

    def col(ref: InputRef) -> np.ndarray:
        return data.X[:, ref.index] if ref.kind == "feature" else values[ref.index]

    for r in range(1, g.max_layers + 1):
        if r == 1:
            pairs = generate_layer_candidates(feature_refs)
        else:
            prev_refs = [InputRef.neuron(c.global_index) for c in survivors]
            pairs = generate_layer_candidates(prev_refs) if len(prev_refs) >= 2 else []
            pairs += [(p, fr) for p in prev_refs for fr in feature_refs]
        layer_candidates = []
        for ref1, ref2 in pairs:
            w, ft, out, cr = _fit_candidate(
                col(ref1), col(ref2), y, idx_a, idx_b, f, g.fitter,
                _derive_seed(g.seed, creation_counter),
            )
            cand = Candidate(
                inputs=(ref1, ref2), weights=w, criterion=cr,
                creation_index=creation_counter, layer=r, outputs=out, fit_trace=ft,
            )
            layer_candidates.append(cand)
            if ft is not None:
                trace.fit_traces.append(ft)
            creation_counter += 1
        selected = select_best(layer_candidates, F)
        for cand in selected:
            cand.global_index = len(all_neurons)
            all_neurons.append((cand.inputs, cand.weights, r))
            values.append(cand.outputs)
        cr_m = selected[0].criterion
        trace.cr_per_layer.append(cr_m)
        survivor_best.append(selected[0])
        if r >= 2 and abs(trace.cr_per_layer[-1] - trace.cr_per_layer[-2]) < g.Delta:
            trace.final_layer = r
            trace.stop_reason = "delta-rule"
            output = survivor_best[r - 2].global_index
            return _prune_and_build(data, all_neurons, output), trace
        survivors = selected
    trace.final_layer = g.max_layers
    trace.stop_reason = "layer-cap"
    output = survivor_best[-1].global_index
    return _prune_and_build(data, all_neurons, output), trace


def grow_incremental(
    data: FeatureTable, g: GrowthParams, f: FitParams
) -> tuple[PolyNetwork, GrowthTrace]:
    """Random-pair growth with accept-if-better-than-both-parents rule.

    The pool starts as the raw features, each scored by the criterion of
    its damped univariate affine fit.  Random distinct pairs are drawn
    from the pool (features and accepted neurons alike); a fitted neuron
    joins the pool only if its criterion beats both parents.  Growth ends
    after ``fail_budget`` consecutive rejections, or errors out if
    nothing is ever accepted within 10 * fail_budget * m attempts.
    """
    if data.n < 2:
        raise GrowthError("need at least 2 rows")
    if data.m < 2:
        raise GrowthError("need at least 2 features")
    y = data.require_binary_labels() if _labels_binary(data) else _require_targets(data)
    idx_a, idx_b = split_indices(
        data.n, f.split_ratio, g.seed, labels=y if _labels_binary(data) else None,
        mode=g.split_mode,
    )

    trace = GrowthTrace(strategy="incremental")
    rng = np.random.default_rng(_derive_seed(g.seed, 0x9E3779B9))

    # pool entries: (ref, mu, values over all n, layer)
    pool = [
        (InputRef.feature(i), _affine_criterion(data.X[:, i], y, idx_a), data.X[:, i], 0)
        for i in range(data.m)
    ]
    all_neurons: list = []
    accepted: list = []  # (global_index, mu)

    failures = 0
    attempt = 0
    cap = 10 * g.fail_budget * data.m
    while failures < g.fail_budget:
        if attempt >= cap and not accepted:
            raise GrowthError(
                f"no neuron accepted within {cap} attempts; targets may be degenerate"
            )
        if attempt >= cap:
            trace.stop_reason = "attempt-cap"
            break
        i, j = rng.choice(len(pool), size=2, replace=False)
        i, j = int(i), int(j)
        ref1, mu1, v1, lay1 = pool[i]
        ref2, mu2, v2, lay2 = pool[j]
        w, ft, out, mu_new = _fit_candidate(
            v1, v2, y, idx_a, idx_b, f, g.fitter, _derive_seed(g.seed, attempt)
        )
        if ft is not None:
            trace.fit_traces.append(ft)
        accepted_now = mu_new < min(mu1, mu2)
        trace.attempts.append(
            {
                "attempt": attempt,
                "pair": [_ref_str(ref1), _ref_str(ref2)],
                "mu_new": mu_new,
                "mu_parents": [mu1, mu2],
                "accepted": accepted_now,
            }
        )
        if accepted_now:
            layer = max(lay1, lay2) + 1
            gidx = len(all_neurons)
            all_neurons.append(((ref1, ref2), w, layer))
            pool.append((InputRef.neuron(gidx), mu_new, out, layer))
            accepted.append((gidx, mu_new))
            failures = 0
        else:
            failures += 1
        attempt += 1
    else:
        trace.stop_reason = "fail-budget"

    if not accepted:
        raise GrowthError("growth failed: no neuron was ever accepted")
    output = min(accepted, key=lambda t: (t[1], t[0]))[0]
    trace.final_layer = all_neurons[output][2]
    return _prune_and_build(data, all_neurons, output), trace


def grow(
    data: FeatureTable, g: GrowthParams, f: FitParams
) -> tuple[PolyNetwork, GrowthTrace]:
    if g.strategy == "layered":
        return grow_layered(data, g, f)
    return grow_incremental(data, g, f)


def _ref_str(ref: InputRef) -> str:
    return ("f" if ref.kind == "feature" else "n") + str(ref.index)


def _labels_binary(data: FeatureTable) -> bool:
    return data.y is not None and bool(np.all(np.isin(data.y, (0.0, 1.0))))


def _require_targets(data: FeatureTable) -> np.ndarray:
    if data.y is None:
        raise GrowthError("table has no target column")
    return data.y
