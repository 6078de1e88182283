"""End-to-end acceptance checks for the full pipeline.

Each test encodes one headline behavior of the package: agreement of the
projection rule with least squares, its convergence behavior, recovery of
planted networks by both growth strategies, feature-extraction fidelity,
metric identities, determinism, and benchmark integrity.
"""

import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from polynet.bench import bench_robustness
from polynet.cli import main
from polynet.features import BAND_PRESETS, SegmentSpec, extract_band_features, segment
from polynet.fitting import (
    DesignPair,
    FitParams,
    expand_design,
    fit_least_squares,
    fit_projection,
)
from polynet.growth import GrowthParams, grow_incremental, grow_layered
from polynet.metrics import Confusion, performance, sensitivity, specificity
from polynet.model import classify_batch, eval_network
from polynet.modelio import parse_model, render_model
from polynet.synth import (
    STANDARD_W,
    NoiseSpec,
    SynthSpec,
    alzheimer_model,
    gen_dataset,
    planted_paper_models,
    recovery_model,
    standard_neuron_task,
)


def test_projection_agrees_with_least_squares():
    hits = 0
    for seed in range(30):
        task = standard_neuron_task(seed)
        w_proj, _ = fit_projection(
            task, FitParams(chi=1.9, delta=1e-6, max_steps=5000, seed=seed)
        )
        w_ls = fit_least_squares(task.U_A, task.y_A)
        gap = np.max(np.abs(w_proj.as_array() - w_ls.as_array()))
        hits += gap < 0.05
    assert hits >= 28


def test_median_step_count_within_budget():
    steps = []
    for seed in range(100):
        task = standard_neuron_task(seed)
        _, trace = fit_projection(task, FitParams(seed=seed))
        steps.append(trace.steps_taken)
    assert np.median(steps) <= 25


def test_higher_learning_rate_reduces_training_error_faster():
    wins = 0
    for seed in range(100):
        task = standard_neuron_task(seed)
        rse = {}
        for chi in (1.25, 2.0):
            # same seed -> same initial weights for both learning rates
            _, trace = fit_projection(
                task, FitParams(chi=chi, delta=1e-12, max_steps=5, seed=seed)
            )
            rse[chi] = trace.rse_A[-1]
        wins += rse[2.0] <= rse[1.25]
    assert wins >= 95


def test_validation_trace_monotone_across_thousand_fits():
    violations = 0
    recorded = 0
    for seed in range(1000):
        task = standard_neuron_task(seed)
        _, trace = fit_projection(task, FitParams(seed=seed))
        recorded += 1
        if not trace.strictly_decreasing_recorded():
            violations += 1
    assert recorded == 1000
    assert violations == 0


def test_contraction_toward_solution_on_consistent_data():
    w_star = np.asarray(STANDARD_W)
    violations = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        U = rng.standard_normal((200, 2))
        y = expand_design(U) @ w_star
        pair = DesignPair(U_A=U[100:], y_A=y[100:], U_B=U[:100], y_B=y[:100])
        for chi in (0.5, 1.0, 1.5, 2.0):
            dists = []
            for k in range(1, 13):
                w, _ = fit_projection(
                    pair, FitParams(chi=chi, delta=1e-300, max_steps=k, seed=seed)
                )
                dists.append(float(np.linalg.norm(w.as_array() - w_star)))
            if any(b > a + 1e-10 for a, b in zip(dists, dists[1:])):
                violations += 1
    assert violations == 0


def _recovery_accuracy(generator, train_res, net, seed):
    test = gen_dataset(
        SynthSpec(generator=generator, m_total=train_res.table.m, n_rows=1000,
                  label_threshold=train_res.threshold, seed=seed + 10_000)
    )
    net = dataclasses.replace(net, threshold=train_res.threshold)
    return float(np.mean(classify_batch(net, test.table.X) == test.table.y))


def test_layered_growth_recovers_planted_chain():
    generator = alzheimer_model()
    informative = generator.input_feature_indices()
    acc_hits = 0
    subset_hits = 0
    for seed in range(30):
        res = gen_dataset(
            SynthSpec(generator=generator, m_total=76, n_rows=800,
                      noise=NoiseSpec(scale=0.05), seed=seed)
        )
        net, _ = grow_layered(
            res.regression_table(),
            GrowthParams(F=1, Delta=0.5, seed=seed),
            FitParams(delta=1e-5),
        )
        acc_hits += _recovery_accuracy(generator, res, net, seed) >= 0.95
        subset_hits += net.input_feature_indices() <= informative
    assert acc_hits >= 27
    assert subset_hits >= 24


def test_incremental_growth_recovers_planted_network():
    generator = recovery_model()
    acc_hits = 0
    budget_endings = 0
    for seed in range(30):
        res = gen_dataset(
            SynthSpec(generator=generator, m_total=36, n_rows=800,
                      noise=NoiseSpec(scale=0.1), seed=seed)
        )
        g = GrowthParams(strategy="incremental", fail_budget=7, seed=seed,
                         fitter="ls")
        net, trace = grow_incremental(
            res.regression_table(), g, FitParams(delta=1e-6, split_ratio=0.3)
        )
        acc_hits += _recovery_accuracy(generator, res, net, seed) >= 0.95
        # replay: every acceptance satisfied the improve-on-both-parents rule
        for a in trace.attempts:
            assert a["accepted"] == (a["mu_new"] < min(a["mu_parents"]))
        # runs stopped by the failure rule end with 7 consecutive rejections
        if trace.stop_reason == "fail-budget":
            budget_endings += 1
            assert all(not a["accepted"] for a in trace.attempts[-g.fail_budget:])
        else:
            assert trace.stop_reason == "attempt-cap"
    assert acc_hits >= 27
    assert budget_endings >= 1


def test_feature_extraction_fidelity():
    rate = 100.0
    # (a) 8 s of signal, 0.5 s windows, 0.25 s steps -> 31 segments
    spec = SegmentSpec(window_s=0.5, step_s=0.25, sample_rate_hz=rate)
    assert len(segment(np.zeros(int(8 * rate)), spec)) == 31

    # (b) six-band preset on two channels plus their sum -> 36 named columns
    t = np.arange(int(30 * rate)) / rate
    chans = {"C3": np.sin(2 * np.pi * 10.0 * t), "C4": np.sin(2 * np.pi * 5.0 * t)}
    table, _ = extract_band_features(
        chans, BAND_PRESETS["neo6"],
        SegmentSpec(window_s=10.0, step_s=10.0, sample_rate_hz=rate),
        mode="absolute+relative", derived_sum_channels=["C3+C4"],
    )
    assert table.m == 36
    for name in ("AbsPowThetaC4", "RelPowThetaC4", "AbsPowSubdeltaC3",
                 "RelPowBeta2C3", "AbsPowSubdeltaC4", "RelPowTheta",
                 "AbsPowAlpha", "RelPowAlphaC4"):
        assert name in table.feature_names

    # (c) a pure 10 Hz tone lands almost entirely in the alpha band
    idx = table.feature_names.index("RelPowAlphaC3")
    assert np.all(table.X[:, idx] >= 0.95)

    # (d) relative powers sum to one per channel
    for suffix in ("C3", "C4", ""):
        names = [f"RelPow{b.name}{suffix}" for b in BAND_PRESETS["neo6"]]
        cols = [table.feature_names.index(n) for n in names]
        np.testing.assert_allclose(table.X[:, cols].sum(axis=1), 1.0, atol=1e-9)


def test_printed_fixture_round_trip_and_composition():
    for net in planted_paper_models():
        assert parse_model(render_model(net)) == net
    chain = alzheimer_model()
    assert eval_network(chain, np.zeros(76)) == pytest.approx(0.795150, abs=1e-6)


def test_metric_identities():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        tp, fn, tn, fp = (int(v) for v in rng.integers(0, 300, 4))
        if tp + fn == 0 or tn + fp == 0:
            continue
        c = Confusion(TP=tp, FN=fn, TN=tn, FP=fp)
        pos, neg = tp + fn, tn + fp
        expected = (pos * Fraction(tp, pos) + neg * Fraction(tn, neg)) / (pos + neg)
        assert Fraction(tp + tn, pos + neg) == expected
        assert performance(c) == float(expected.numerator) / float(expected.denominator)
    c = Confusion(TP=63, FN=37, TN=993, FP=7)
    assert (sensitivity(c), specificity(c), performance(c)) == (0.63, 0.993, 0.96)


def test_training_is_deterministic_across_thread_counts(tmp_path):
    data = tmp_path / "d.csv"
    assert main(["synth", "--model", "alz", "--m-total", "76", "--rows", "300",
                 "--scale", "0.05", "--seed", "4", "--out", str(data)]) == 0
    outputs = []
    for threads in ("1", "4"):
        for rep in range(2):
            out = tmp_path / f"m{threads}_{rep}.pn"
            assert main(["train", str(data), "--F", "1", "--Delta", "0.5",
                         "--seed", "11", "--threads", threads,
                         "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
    assert len(set(outputs)) == 1


def test_robustness_bench_well_formed_with_gaussian_tie():
    report = bench_robustness(runs=30, seed=1)
    rows = {(r["noise"], r["fitter"]): r for r in report["rows"]}
    assert set(rows) == {
        (noise, fitter)
        for noise in ("gaussian", "laplace", "student-t")
        for fitter in ("projection", "ls")
    }
    for r in rows.values():
        assert r["runs"] == 30
        assert r["half_width"] >= 0.0
    gauss_proj = rows[("gaussian", "projection")]["mean"]
    gauss_ls = rows[("gaussian", "ls")]["mean"]
    assert abs(gauss_proj - gauss_ls) <= 0.10 * gauss_ls
