import numpy as np
import pytest

from polynet.data import FeatureTable
from polynet.fitting import FitParams, expand_design
from polynet.growth import (
    Candidate,
    GrowthError,
    GrowthParams,
    default_F,
    generate_layer_candidates,
    grow,
    grow_incremental,
    grow_layered,
    select_best,
)
from polynet.model import InputRef, Weights4, eval_network_batch
from polynet.synth import STANDARD_W


def single_neuron_table(seed=0, n=400, m=4, noise=0.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, m))
    y = expand_design(X[:, :2]) @ np.asarray(STANDARD_W)
    if noise:
        y = y + rng.normal(0, noise, n)
    return FeatureTable([f"x{i+1}" for i in range(m)], X, y)


def test_default_F_values():
    assert default_F(10) == 18
    assert default_F(2) == 1
    assert default_F(36) == 252


def test_default_F_needs_two_features():
    with pytest.raises(GrowthError):
        default_F(1)


def test_layer_candidates_are_lexicographic_pairs():
    pool = [InputRef.feature(i) for i in range(4)]
    pairs = generate_layer_candidates(pool)
    assert len(pairs) == 6
    assert pairs[0] == (pool[0], pool[1])
    assert pairs[-1] == (pool[2], pool[3])


def test_layer_candidates_pool_too_small():
    with pytest.raises(GrowthError):
        generate_layer_candidates([InputRef.feature(0)])


def mk_cand(crit, idx):
    return Candidate(
        inputs=(InputRef.feature(0), InputRef.feature(1)),
        weights=Weights4(0, 1, 1, 0), criterion=crit, creation_index=idx,
    )


def test_select_best_orders_by_criterion():
    cands = [mk_cand(3.0, 0), mk_cand(1.0, 1), mk_cand(2.0, 2)]
    best = select_best(cands, 2)
    assert [c.criterion for c in best] == [1.0, 2.0]


def test_select_best_tie_breaks_by_creation_index():
    cands = [mk_cand(1.0, 5), mk_cand(1.0, 2)]
    assert select_best(cands, 1)[0].creation_index == 2


def test_select_best_f_larger_than_pool():
    cands = [mk_cand(2.0, 0), mk_cand(1.0, 1)]
    assert [c.criterion for c in select_best(cands, 10)] == [1.0, 2.0]


def test_select_best_empty_errors():
    with pytest.raises(GrowthError):
        select_best([], 3)


def test_layered_single_neuron_data_depth_one():
    table = single_neuron_table()
    net, trace = grow_layered(
        table, GrowthParams(F=2, seed=0, fitter="ls"), FitParams()
    )
    assert net.depth == 1
    assert trace.cr_per_layer[0] <= 1e-6
    assert net.input_feature_indices() == {0, 1}


def test_layered_huge_delta_stops_after_second_layer():
    # with an enormous stopping gap the rule fires at the first layer
    # where it can be checked, and the network comes from the layer before
    table = single_neuron_table(noise=0.3)
    net, trace = grow_layered(
        table, GrowthParams(F=3, Delta=1e12, seed=1), FitParams()
    )
    assert trace.final_layer == 2
    assert trace.stop_reason == "delta-rule"
    assert len(trace.cr_per_layer) == 2
    assert net.depth == 1


def test_layered_noise_free_ls_reaches_zero_criterion():
    table = single_neuron_table()
    _, trace = grow_layered(
        table, GrowthParams(F=2, seed=3, fitter="ls"), FitParams()
    )
    assert min(trace.cr_per_layer) <= 1e-6


def test_returned_network_is_fully_pruned():
    table = single_neuron_table(noise=0.2, m=6)
    net, _ = grow_layered(table, GrowthParams(F=3, seed=5), FitParams())
    reachable = set()
    stack = [net.output]
    while stack:
        j = stack.pop()
        reachable.add(j)
        for ref in net.neurons[j].inputs:
            if ref.kind == "neuron":
                stack.append(ref.index)
    assert reachable == set(range(len(net.neurons)))


def test_growth_deterministic():
    table = single_neuron_table(noise=0.1, m=5)
    for strategy in ("layered", "incremental"):
        g = GrowthParams(strategy=strategy, seed=7, fitter="ls")
        net1, _ = grow(table, g, FitParams(seed=7))
        net2, _ = grow(table, g, FitParams(seed=7))
        assert net1 == net2


def test_incremental_acceptance_rule_recorded():
    table = single_neuron_table(noise=0.1, m=6, n=600)
    _, trace = grow_incremental(
        table, GrowthParams(strategy="incremental", seed=3, fitter="ls"),
        FitParams(),
    )
    assert trace.attempts
    for a in trace.attempts:
        assert a["accepted"] == (a["mu_new"] < min(a["mu_parents"]))


def test_incremental_constant_target_fails_fast():
    rng = np.random.default_rng(0)
    table = FeatureTable(["x1", "x2", "x3"], rng.standard_normal((50, 3)),
                         np.ones(50))
    with pytest.raises(GrowthError):
        grow_incremental(
            table,
            GrowthParams(strategy="incremental", fail_budget=1, seed=0),
            FitParams(),
        )


def test_incremental_trace_ends_with_failures_when_budget_fires():
    table = single_neuron_table(noise=0.1, m=6, n=600)
    g = GrowthParams(strategy="incremental", seed=3, fitter="ls")
    _, trace = grow_incremental(table, g, FitParams())
    if trace.stop_reason == "fail-budget":
        tail = trace.attempts[-g.fail_budget:]
        assert all(not a["accepted"] for a in tail)
    else:
        assert trace.stop_reason == "attempt-cap"


def test_returned_output_matches_recomputed_criterion():
    table = single_neuron_table(noise=0.05, m=4)
    net, _ = grow_layered(table, GrowthParams(F=2, seed=2, fitter="ls"),
                          FitParams())
    pred = eval_network_batch(net, table.X)
    resid = float(np.sum((pred - table.y) ** 2))
    assert resid < float(np.sum((table.y - table.y.mean()) ** 2))


def test_growth_params_validation():
    with pytest.raises(GrowthError):
        GrowthParams(strategy="magic")
    with pytest.raises(GrowthError):
        GrowthParams(F=0)
    with pytest.raises(GrowthError):
        GrowthParams(Delta=0.0)
    with pytest.raises(GrowthError):
        GrowthParams(fail_budget=0)
