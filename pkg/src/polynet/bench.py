"""Benchmark suites: convergence curves, noise robustness, planted recovery.

Each suite returns a plain dict ready for JSON serialization; the CLI
writes it out together with a flat CSV and (optionally) rendered figures.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .fitting import FitParams, expand_design, fit_least_squares, fit_projection
from .growth import GrowthParams, grow_layered
from .metrics import repeated_runs
from .model import classify_batch
from .synth import (
    NoiseSpec,
    SynthSpec,
    alzheimer_model,
    gen_dataset,
    standard_neuron_task,
)

__all__ = ["bench_convergence", "bench_robustness", "bench_recovery", "run_suite"]

CONVERGENCE_CHIS = (1.25, 1.5, 1.75, 2.0)
NOISE_FAMILIES = ("gaussian", "laplace", "student-t")


def bench_convergence(seed: int = 0, max_steps: int = 40) -> dict:
    """Learning curves of the projection rule for four learning rates."""
    curves = []
    for chi in CONVERGENCE_CHIS:
        pair = standard_neuron_task(seed)
        params = FitParams(chi=chi, delta=1e-9, max_steps=max_steps, seed=seed)
        _, trace = fit_projection(pair, params)
        curves.append(
            {
                "chi": chi,
                "steps": trace.steps_taken,
                "stop_reason": trace.stop_reason,
                "rse_train": trace.rse_A,
                "e_B": trace.e_B,
            }
        )
    return {"suite": "convergence", "seed": seed, "curves": curves}


def _validation_mse(pair, w) -> float:
    r = expand_design(pair.U_B) @ w.as_array() - pair.y_B
    return float(np.mean(r * r))


def bench_robustness(runs: int = 30, seed: int = 0) -> dict:
    """Projection vs least-squares validation MSE per noise family."""
    rows = []
    for family in NOISE_FAMILIES:
        noise = NoiseSpec(family=family, scale=0.1)
        for fitter in ("projection", "ls"):
            def one(run_seed, family=family, fitter=fitter, noise=noise):
                pair = standard_neuron_task(run_seed, noise=noise)
                if fitter == "ls":
                    w = fit_least_squares(pair.U_A, pair.y_A)
                else:
                    w, _ = fit_projection(
                        pair, FitParams(chi=1.9, delta=1e-6, seed=run_seed)
                    )
                return _validation_mse(pair, w)

            stats = repeated_runs(one, range(seed, seed + runs))
            rows.append(
                {
                    "noise": family,
                    "fitter": fitter,
                    "mean": stats.mean,
                    "half_width": stats.half_width,
                    "runs": stats.runs,
                    "convention": stats.convention,
                    "values": list(stats.values),
                }
            )
    return {"suite": "robustness", "seed": seed, "rows": rows}


def bench_recovery(runs: int = 30, seed: int = 0, n_train: int = 800) -> dict:
    """Held-out accuracy of layered growth on the planted 3-neuron chain."""
    gen = alzheimer_model()

    def one(run_seed):
        res = gen_dataset(
            SynthSpec(generator=gen, m_total=76, n_rows=n_train,
                      noise=NoiseSpec(scale=0.05), seed=run_seed)
        )
        test = gen_dataset(
            SynthSpec(generator=gen, m_total=76, n_rows=1000,
                      label_threshold=res.threshold, seed=run_seed + 10_000)
        )
        net, _ = grow_layered(
            res.regression_table(),
            GrowthParams(F=1, Delta=0.5, seed=run_seed),
            FitParams(delta=1e-5),
        )
        net = dataclasses.replace(net, threshold=res.threshold)
        return float(np.mean(classify_batch(net, test.table.X) == test.table.y))

    stats = repeated_runs(one, range(seed, seed + runs))
    return {
        "suite": "recovery",
        "seed": seed,
        "metric": "held-out accuracy",
        "mean": stats.mean,
        "half_width": stats.half_width,
        "runs": stats.runs,
        "convention": stats.convention,
        "values": list(stats.values),
    }


def run_suite(name: str, runs: int = 30, seed: int = 0) -> dict:
    if name == "convergence":
        return bench_convergence(seed=seed)
    if name == "robustness":
        return bench_robustness(runs=runs, seed=seed)
    if name == "recovery":
        return bench_recovery(runs=runs, seed=seed)
    raise ValueError(f"unknown suite {name!r}")
