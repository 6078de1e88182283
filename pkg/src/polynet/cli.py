"""Command-line interface: extract, train, eval, bench, synth.

Exit codes: 0 success, 1 usage error, 2 data error, 3 growth or
convergence failure.  Every subcommand is deterministic given its inputs,
flags, and seed, and never mutates its input files.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys

import numpy as np

from .data import DataError, read_feature_csv, write_feature_csv
from .features import (
    BAND_PRESETS,
    BandSpec,
    FeatureError,
    SegmentSpec,
    extract_band_features,
    normalize_apply,
    normalize_fit,
)
from .fitting import FitParams, FittingError
from .growth import GrowthError, GrowthParams, grow
from .metrics import MetricError, confusion, performance, sensitivity, specificity
from .model import NetworkError, classify_batch
from .modelio import ModelParseError, parse_model, render_model
from .synth import (
    NoiseSpec,
    SynthError,
    SynthSpec,
    alzheimer_model,
    gen_dataset,
    recovery_model,
    sleep_model,
)
from . import bench as bench_mod

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONVERGENCE = 3

_MODE_FLAGS = {"abs": "absolute", "abs+rel": "absolute+relative"}
_SYNTH_MODELS = {
    "alz": alzheimer_model,
    "sleep": sleep_model,
    "recovery": recovery_model,
}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class UsageError(ValueError):
    pass


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in unsigned 64 bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polynet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("extract", parents=[], help="raw signal CSV -> feature CSV")
    p.add_argument("input", help="raw CSV: header of channel names, one sample per row")
    p.add_argument("--rate", type=float, required=True, help="sample rate in Hz")
    p.add_argument("--window", type=float, default=10.0, help="window length in seconds")
    p.add_argument("--step", type=float, default=None, help="step in seconds (default: window)")
    p.add_argument("--bands", required=True,
                   help='preset:alz4, preset:neo6, or JSON [["name", lo, hi], ...]')
    p.add_argument("--mode", choices=sorted(_MODE_FLAGS), default="abs")
    p.add_argument("--sum-channels", action="append", default=[],
                   metavar="A+B", help="derived sum channel, e.g. C3+C4 (repeatable)")
    p.add_argument("--taper", choices=["rect", "hann"], default="rect")
    p.add_argument("--label", type=float, default=None,
                   help="attach this label to every emitted row")
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="feature CSV -> model file + trace JSON")
    p.add_argument("input", help="feature CSV with a binary label column")
    p.add_argument("--algo", choices=["layered", "incremental"], default="layered")
    p.add_argument("--fitter", choices=["projection", "ls"], default="projection")
    p.add_argument("--F", type=int, default=None, help="survivors per layer")
    p.add_argument("--Delta", type=float, default=1e-4, help="layer-criterion stop gap")
    p.add_argument("--chi", type=float, default=1.9)
    p.add_argument("--delta", type=float, default=0.015)
    p.add_argument("--split", type=float, default=0.5, help="validation fraction")
    p.add_argument("--split-mode", choices=["stratified", "interleaved"],
                   default="stratified")
    p.add_argument("--fail-budget", type=int, default=7)
    p.add_argument("--max-layers", type=int, default=10)
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap; results are thread-count invariant")
    p.add_argument("--normalize", action="store_true",
                   help="store feature mean/std in the model and train on z-scores")
    p.add_argument("--out", required=True, help="model output path")
    p.add_argument("--trace", default=None,
                   help="trace JSON path (default: <out>.trace.json)")

    p = sub.add_parser("eval", help="model + feature CSV -> metrics report JSON")
    p.add_argument("model")
    p.add_argument("input", help="feature CSV with a binary label column")
    p.add_argument("--report", required=True)

    p = sub.add_parser("bench", help="run a benchmark suite")
    p.add_argument("--suite", choices=["convergence", "robustness", "recovery"],
                   required=True)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True, help="report JSON path (CSV written beside it)")
    p.add_argument("--figures", default=None, metavar="DIR",
                   help="also render figures into DIR")

    p = sub.add_parser("synth", help="generate a labeled synthetic feature CSV")
    p.add_argument("--model", choices=sorted(_SYNTH_MODELS), default="alz",
                   help="planted generator fixture")
    p.add_argument("--model-file", default=None,
                   help="use this serialized network as generator instead")
    p.add_argument("--m-total", type=int, default=None,
                   help="total feature count (default: generator's)")
    p.add_argument("--rows", type=int, default=1000)
    p.add_argument("--noise", choices=["gaussian", "laplace", "student-t"],
                   default="gaussian")
    p.add_argument("--scale", type=float, default=0.1)
    p.add_argument("--df", type=float, default=3.0, help="student-t degrees of freedom")
    p.add_argument("--threshold", default="median",
                   help='label threshold: a real number or "median"')
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True, help="CSV path (sidecar JSON written beside it)")
    return parser


def _parse_bands(text: str):
    if text.startswith("preset:"):
        name = text[len("preset:"):]
        if name not in BAND_PRESETS:
            raise UsageError(f"unknown band preset {name!r}")
        return BAND_PRESETS[name]
    try:
        raw = json.loads(text)
        return tuple(BandSpec(str(n), float(lo), float(hi)) for n, lo, hi in raw)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        if isinstance(exc, FeatureError):
            raise
        raise UsageError(f"cannot parse --bands: {exc}") from exc


def _read_signal_csv(path: str) -> dict:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header:
                raise DataError(f"{path}: empty file")
            rows = [[float(tok) for tok in row] for row in reader if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric sample: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no sample rows")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] != len(header):
        raise DataError(f"{path}: ragged rows")
    return {name: data[:, i] for i, name in enumerate(header)}


def cmd_extract(args) -> int:
    bands = _parse_bands(args.bands)
    channels = _read_signal_csv(args.input)
    for name in args.sum_channels:
        for part in name.split("+"):
            if part not in channels:
                raise UsageError(f"--sum-channels: unknown channel {part!r}")
    spec = SegmentSpec(
        window_s=args.window,
        step_s=args.step if args.step is not None else args.window,
        sample_rate_hz=args.rate,
    )
    table, flagged = extract_band_features(
        channels,
        bands,
        spec,
        mode=_MODE_FLAGS[args.mode],
        derived_sum_channels=args.sum_channels or None,
        label=args.label,
        taper=args.taper,
    )
    if flagged:
        print(f"warning: {len(flagged)} zero-power segment(s): {flagged}",
              file=sys.stderr)
    write_feature_csv(args.out, table)
    print(f"wrote {table.n} rows x {table.m} feature columns to {args.out}")
    return EXIT_OK


def _trace_json(trace) -> dict:
    return {
        "strategy": trace.strategy,
        "stop_reason": trace.stop_reason,
        "final_layer": trace.final_layer,
        "cr_per_layer": trace.cr_per_layer,
        "attempts": trace.attempts,
        "fit_traces": [
            {
                "e_B": t.e_B,
                "rse_A": t.rse_A,
                "steps_taken": t.steps_taken,
                "stop_reason": t.stop_reason,
            }
            for t in trace.fit_traces
        ],
    }


def cmd_train(args) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    try:
        fparams = FitParams(chi=args.chi, delta=args.delta, split_ratio=args.split,
                            max_steps=args.max_steps, seed=args.seed)
        gparams = GrowthParams(strategy=args.algo, F=args.F, Delta=args.Delta,
                               fail_budget=args.fail_budget,
                               max_layers=args.max_layers, seed=args.seed,
                               fitter=args.fitter, split_mode=args.split_mode)
    except (FittingError, GrowthError, DataError) as exc:
        raise UsageError(str(exc)) from exc
    table = read_feature_csv(args.input)
    table.require_binary_labels()
    stats = None
    if args.normalize:
        stats = normalize_fit(table)
        table = normalize_apply(table, stats)
    net, trace = grow(table, gparams, fparams)
    if stats is not None:
        net = dataclasses.replace(
            net,
            norm_stats=tuple(
                (float(mu), float(sd)) for mu, sd in zip(stats.mean, stats.std)
            ),
        )
    with open(args.out, "w") as fh:
        fh.write(render_model(net))
    trace_path = args.trace or args.out + ".trace.json"
    with open(trace_path, "w") as fh:
        json.dump(_trace_json(trace), fh, indent=2)
        fh.write("\n")
    print(f"wrote model ({len(net.neurons)} neurons, depth {net.depth}) to {args.out}")
    print(f"wrote trace to {trace_path}")
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        with open(args.model) as fh:
            net = parse_model(fh.read())
    except OSError as exc:
        raise DataError(f"cannot read {args.model}: {exc}") from exc
    table = read_feature_csv(args.input)
    if table.m != net.m:
        raise DataError(
            f"model expects {net.m} feature columns, data has {table.m}"
        )
    labels = table.require_binary_labels()
    preds = classify_batch(net, table.X)
    c = confusion(labels, preds)
    report = {
        "confusion": {"tp": c.TP, "fn": c.FN, "tn": c.TN, "fp": c.FP},
        "n": c.total,
    }
    warnings = []
    for name, fn in (("sensitivity", sensitivity), ("specificity", specificity),
                     ("performance", performance)):
        try:
            report[name] = fn(c)
        except MetricError as exc:
            report[name] = {"error": str(exc)}
            warnings.append(f"warning: {name} undefined: {exc}")
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    for line in warnings:
        print(line, file=sys.stderr)
    print(f"wrote report to {args.report}")
    return EXIT_OK


def _bench_csv_rows(report: dict) -> tuple[list, list]:
    suite = report["suite"]
    if suite == "convergence":
        header = ["chi", "step", "rse_train", "e_B"]
        rows = [
            [c["chi"], k, c["rse_train"][k], c["e_B"][k]]
            for c in report["curves"]
            for k in range(len(c["e_B"]))
        ]
    elif suite == "robustness":
        header = ["noise", "fitter", "mean", "half_width", "runs"]
        rows = [
            [r["noise"], r["fitter"], r["mean"], r["half_width"], r["runs"]]
            for r in report["rows"]
        ]
    else:
        header = ["run", "accuracy"]
        rows = list(enumerate(report["values"]))
    return header, rows


def cmd_bench(args) -> int:
    if args.runs < 2:
        raise UsageError("--runs must be >= 2")
    report = bench_mod.run_suite(args.suite, runs=args.runs, seed=args.seed)
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    csv_path = args.out.rsplit(".", 1)[0] + ".csv" if args.out.endswith(".json") \
        else args.out + ".csv"
    header, rows = _bench_csv_rows(report)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    written = [args.out, csv_path]
    if args.figures is not None:
        from .plots import render_report_figures

        written += render_report_figures(report, args.figures)
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.model_file is not None:
        try:
            with open(args.model_file) as fh:
                generator = parse_model(fh.read())
        except OSError as exc:
            raise DataError(f"cannot read {args.model_file}: {exc}") from exc
    else:
        generator = _SYNTH_MODELS[args.model]()
    if args.threshold == "median":
        threshold: float | str = "median"
    else:
        try:
            threshold = float(args.threshold)
        except ValueError as exc:
            raise UsageError('--threshold must be a real number or "median"') from exc
    spec = SynthSpec(
        generator=generator,
        m_total=args.m_total if args.m_total is not None else generator.m,
        n_rows=args.rows,
        noise=NoiseSpec(family=args.noise, scale=args.scale, df=args.df),
        label_threshold=threshold,
        seed=args.seed,
    )
    res = gen_dataset(spec)
    write_feature_csv(args.out, res.table)
    sidecar = {
        "generator": render_model(generator),
        "m_total": spec.m_total,
        "n_rows": spec.n_rows,
        "noise": {"family": spec.noise.family, "scale": spec.noise.scale,
                  "df": spec.noise.df},
        "label_threshold": res.threshold,
        "seed": spec.seed,
        "class_balance": float(np.mean(res.table.y)),
    }
    sidecar_path = args.out + ".json"
    with open(sidecar_path, "w") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    print(f"wrote {res.table.n} rows to {args.out} (sidecar {sidecar_path})")
    return EXIT_OK


_COMMANDS = {
    "extract": cmd_extract,
    "train": cmd_train,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"polynet {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FeatureError, ModelParseError, NetworkError, SynthError,
            MetricError) as exc:
        print(f"polynet {args.subcommand}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (GrowthError, FittingError) as exc:
        print(f"polynet {args.subcommand}: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    raise SystemExit(main())
