"""Command-line entry point for reproducible experiments.

Subcommands: ``rank-features``, ``crossval``, ``compare``, ``bench-optimizer``,
``train``, ``predict``.  Every parameter can come from a ``key = value``
config file (``--config``); command-line flags win over the file, the file
wins over built-in defaults, and the built-in defaults reproduce the stock
experiment (5 folds, 50 agents, 75 iterations, the dual-context recurrent
topology).  The seed falls back to the ``WOLFNET_SEED`` environment variable
when neither flag nor file provides one.

Each run writes a ``run_manifest.json`` echoing the fully resolved
configuration; re-running with the same manifest reproduces every report file
byte for byte.  Reports are written atomically (temp file, then rename).
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys

from . import __version__, _kernels
from .benchmarks import BENCHMARKS
from .data import (
    LoadSchema,
    correlation_rank,
    load_csv,
    normalize,
    select_features,
    stratified_folds,
)
from .errors import WolfnetError
from .network import dimension
from .optimizer import GwoConfig, optimize
from .reports import (
    atomic_write,
    comparison_document,
    comparison_text,
    to_json,
    write_crossval_reports,
)
from .training import (
    MODEL_VARIANTS,
    compare_models,
    config_for_model,
    cross_validate,
    derive_seed,
    evaluate,
    load_model,
    predict,
    save_model,
    train,
)

DEFAULT_SEED = 42
DEFAULT_OUT = "wolfnet-out"
#: Feature columns removed by default when present (no effect on the label).
DEFAULT_DROP = ("College", "High School (Village)")
CLASS_NAMES = {1: "pass", 0: "fail"}


def parse_config_file(path):
    """Read ``key = value`` lines; ``#`` starts a comment, blanks are skipped."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = text.partition("=")
            values[key.strip().replace("_", "-")] = value.strip()
    return values


class Resolver:
    """Merge flag, config-file and default values, flags winning."""

    def __init__(self, args):
        self.args = args
        self.file_values = parse_config_file(args.config) if args.config else {}

    def get(self, key, cast=str, default=None):
        flag = getattr(self.args, key.replace("-", "_"), None)
        if flag is not None:
            return flag
        if key in self.file_values:
            raw = self.file_values[key]
            if cast is bool:
                return raw.lower() in ("1", "true", "yes", "on")
            return cast(raw)
        return default

    def require(self, key, cast=str):
        value = self.get(key, cast)
        if value is None:
            raise ValueError(f"missing required option --{key}")
        return value

    def seed(self) -> int:
        value = self.get("seed", int)
        if value is not None:
            return value
        env = os.environ.get("WOLFNET_SEED")
        if env:
            return int(env)
        return DEFAULT_SEED


def _parse_drop(spec_text, available):
    """Resolve the drop list; None means the stock defaults where present."""
    if spec_text is None:
        return [name for name in DEFAULT_DROP if name in available]
    names = [part.strip() for part in spec_text.split(",") if part.strip()]
    return names


def _parse_label_column(text):
    if text is None or text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return text


def _load_schema(res: Resolver) -> LoadSchema:
    return LoadSchema(
        has_header=not res.get("no-header", bool, False),
        label_column=_parse_label_column(res.get("label-column")),
        positive_label=res.get("positive-label"),
    )


def _load_dataset(res: Resolver):
    """Shared ingestion pipeline: parse, drop columns, then normalize."""
    raw = load_csv(res.require("data"), _load_schema(res))
    drop = _parse_drop(res.get("drop"), raw.feature_names)
    if drop:
        raw = select_features(raw, drop)
    return normalize(raw), drop


def _write_manifest(out_dir, command, resolved: dict) -> None:
    document = dict(resolved)
    document["command"] = command
    document["kernel"] = _kernels.backend_name()
    document["version"] = __version__
    atomic_write(os.path.join(out_dir, "run_manifest.json"), to_json(document))


def cmd_rank_features(args) -> int:
    res = Resolver(args)
    out_dir = res.get("out", str, DEFAULT_OUT)
    raw = load_csv(res.require("data"), _load_schema(res))
    drop = _parse_drop(res.get("drop"), raw.feature_names)
    report = correlation_rank(normalize(raw), drop=drop)

    _write_manifest(out_dir, "rank-features", {
        "data": res.require("data"), "drop": drop,
        "label_column": res.get("label-column"),
        "positive_label": res.get("positive-label"),
        "no_header": res.get("no-header", bool, False),
        "out": out_dir,
    })
    atomic_write(os.path.join(out_dir, "feature_report.csv"), report.to_csv())

    print(f"{'rank':>4}  {'pearson_r':>12}  feature")
    for e in report.entries[:10]:
        marker = "  (dropped)" if e.dropped else ""
        print(f"{e.abs_rank:>4}  {e.pearson_r:>12.6f}  {e.name}{marker}")
    print(f"report: {os.path.join(out_dir, 'feature_report.csv')}")
    return 0


def _training_options(res: Resolver) -> dict:
    return {
        "agents": res.get("agents", int, 50),
        "iterations": res.get("iterations", int, 75),
        "threshold": res.get("threshold", float, 0.5),
        "seed": res.seed(),
    }


def cmd_crossval(args) -> int:
    res = Resolver(args)
    out_dir = res.get("out", str, DEFAULT_OUT)
    model_name = res.get("model", str, "mrnngwo")
    folds = res.get("folds", int, 5)
    jobs = res.get("jobs", int, 1)
    options = _training_options(res)
    dataset, drop = _load_dataset(res)

    config = config_for_model(model_name, dataset.features.shape[1], **options)
    plan = stratified_folds(dataset, folds, derive_seed(options["seed"], "fold-plan"))
    result = cross_validate(config, dataset, plan, jobs=jobs)

    _write_manifest(out_dir, "crossval", {
        "data": res.require("data"), "model": model_name, "folds": folds,
        "jobs": jobs, "drop": drop, "out": out_dir,
        "label_column": res.get("label-column"),
        "positive_label": res.get("positive-label"),
        "no_header": res.get("no-header", bool, False),
        **options,
    })
    write_crossval_reports(out_dir, model_name, dimension(config.topology), result)

    for f in result.folds:
        print(
            f"fold {f.fold + 1}: train_mse={f.train_mse:.7f} "
            f"train_rate={f.train_rate:.4f} test_mse={f.test_mse:.7f} "
            f"test_rate={f.test_rate:.4f}"
        )
    avg = result.averages
    auc = "-" if avg["auc"] is None else f"{avg['auc']:.4f}"
    print(
        f"average: train_rate={avg['train_rate']:.4f} "
        f"test_rate={avg['test_rate']:.4f} auc={auc}"
    )
    print(f"reports: {out_dir}")
    return 0


def cmd_compare(args) -> int:
    res = Resolver(args)
    out_dir = res.get("out", str, DEFAULT_OUT)
    folds = res.get("folds", int, 5)
    jobs = res.get("jobs", int, 1)
    options = _training_options(res)
    names_text = res.get("models")
    if names_text:
        names = [n.strip() for n in names_text.split(",") if n.strip()]
        unknown = [n for n in names if n not in MODEL_VARIANTS]
        if unknown:
            raise ValueError(f"unknown model name(s): {unknown}")
    else:
        names = list(MODEL_VARIANTS)
    dataset, drop = _load_dataset(res)

    suite = [
        (name, config_for_model(name, dataset.features.shape[1], **options))
        for name in names
    ]
    rows = compare_models(dataset, stratified_folds(
        dataset, folds, derive_seed(options["seed"], "fold-plan")), suite, jobs=jobs)

    _write_manifest(out_dir, "compare", {
        "data": res.require("data"), "models": names, "folds": folds,
        "jobs": jobs, "drop": drop, "out": out_dir,
        "label_column": res.get("label-column"),
        "positive_label": res.get("positive-label"),
        "no_header": res.get("no-header", bool, False),
        **options,
    })
    atomic_write(os.path.join(out_dir, "comparison.json"), to_json(comparison_document(rows)))
    text = comparison_text(rows)
    atomic_write(os.path.join(out_dir, "comparison.txt"), text)
    print(text, end="")
    print(f"reports: {out_dir}")
    return 0


def cmd_bench_optimizer(args) -> int:
    res = Resolver(args)
    out_dir = res.get("out", str, DEFAULT_OUT)
    function = res.get("function", str, "sphere")
    if function not in BENCHMARKS:
        raise ValueError(f"unknown function {function!r}; expected one of {sorted(BENCHMARKS)}")
    variant = res.get("variant", str, "both")
    if variant not in ("standard", "modified", "both"):
        raise ValueError(f"unknown variant {variant!r}")
    variants = ["standard", "modified"] if variant == "both" else [variant]
    dim = res.get("dimension", int, 10)
    agents = res.get("agents", int, 30)
    iterations = res.get("iterations", int, 500)
    runs = res.get("runs", int, 10)
    seed = res.seed()

    objective, (low, high) = BENCHMARKS[function]
    summary = {"function": function, "dimension": dim, "agents": agents,
               "iterations": iterations, "runs": runs, "seed": seed, "variants": {}}
    for var in variants:
        finals = []
        for run in range(runs):
            config = GwoConfig(
                agents=agents, max_iterations=iterations, dimension=dim,
                lower_bound=low, upper_bound=high, variant=var,
                seed=derive_seed(seed, "bench", function, var, run),
            )
            result = optimize(config, objective)
            finals.append(result.fitness)
            atomic_write(
                os.path.join(out_dir, f"trace_{function}_{var}_run{run}.csv"),
                result.trace.to_csv(),
            )
        summary["variants"][var] = {
            "final_fitness": finals,
            "median_final_fitness": statistics.median(finals),
            "best_final_fitness": min(finals),
        }
        print(
            f"{function} d={dim} {var}: median={statistics.median(finals):.6g} "
            f"best={min(finals):.6g} over {runs} runs"
        )

    _write_manifest(out_dir, "bench-optimizer", {
        "function": function, "variant": variant, "dimension": dim,
        "agents": agents, "iterations": iterations, "runs": runs,
        "seed": seed, "out": out_dir,
    })
    atomic_write(os.path.join(out_dir, "summary.json"), to_json(summary))
    print(f"reports: {out_dir}")
    return 0


def cmd_train(args) -> int:
    res = Resolver(args)
    out_dir = res.get("out", str, DEFAULT_OUT)
    model_name = res.get("model", str, "mrnngwo")
    options = _training_options(res)
    dataset, drop = _load_dataset(res)

    config = config_for_model(model_name, dataset.features.shape[1], **options)
    model = train(config, dataset.samples)
    fit = evaluate(model, dataset.samples)

    _write_manifest(out_dir, "train", {
        "data": res.require("data"), "model": model_name, "drop": drop,
        "out": out_dir, "label_column": res.get("label-column"),
        "positive_label": res.get("positive-label"),
        "no_header": res.get("no-header", bool, False),
        **options,
    })
    model_path = os.path.join(out_dir, "model.txt")
    os.makedirs(out_dir, exist_ok=True)
    save_model(model, model_path)
    atomic_write(os.path.join(out_dir, "trace.csv"), model.trace.to_csv())
    print(f"train_mse={model.train_mse:.7f} train_rate={fit.rate:.4f}")
    print(f"model: {model_path}")
    return 0


def cmd_predict(args) -> int:
    res = Resolver(args)
    out_dir = res.get("out", str, DEFAULT_OUT)
    model_path = res.require("model-file")
    model = load_model(model_path)
    dataset, drop = _load_dataset(res)
    if dataset.features.shape[1] != model.topology.input_size:
        raise ValueError(
            f"dataset has {dataset.features.shape[1]} features but the model "
            f"expects {model.topology.input_size}"
        )

    lines = ["sample_index,score,class"]
    correct = 0
    for i, sample in enumerate(dataset.samples):
        score, label = predict(model, sample.features)
        correct += int(label == sample.label)
        lines.append(f"{i},{score!r},{CLASS_NAMES[label]}")

    _write_manifest(out_dir, "predict", {
        "data": res.require("data"), "model_file": model_path, "drop": drop,
        "out": out_dir, "label_column": res.get("label-column"),
        "positive_label": res.get("positive-label"),
        "no_header": res.get("no-header", bool, False),
    })
    atomic_write(os.path.join(out_dir, "predictions.csv"), "\n".join(lines) + "\n")
    print(f"scored {len(dataset)} samples, agreement with labels: "
          f"{correct / len(dataset):.4f}")
    print(f"predictions: {os.path.join(out_dir, 'predictions.csv')}")
    return 0


def _add_common(parser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--seed", type=int, help="master seed (default: WOLFNET_SEED or 42)")
    parser.add_argument("--out", help=f"output directory (default {DEFAULT_OUT})")


def _add_data_flags(parser):
    parser.add_argument("--data", help="CSV dataset path")
    parser.add_argument("--drop", help="comma-separated feature columns to remove")
    parser.add_argument("--label-column", help="label column name or 0-based index (default: last)")
    parser.add_argument("--positive-label", help="text of the positive (pass) label")
    parser.add_argument("--no-header", action="store_const", const=True, default=None,
                        help="treat the first row as data, not a header")


def _add_training_flags(parser):
    parser.add_argument("--model", choices=sorted(MODEL_VARIANTS), help="model name")
    parser.add_argument("--agents", type=int, help="population size (default 50)")
    parser.add_argument("--iterations", type=int, help="optimizer iterations (default 75)")
    parser.add_argument("--threshold", type=float, help="classification threshold (default 0.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wolfnet",
        description="Gradient-free training of small neural classifiers with grey wolf optimizers.",
    )
    parser.add_argument("--version", action="version", version=f"wolfnet {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("rank-features", help="Pearson-correlation feature ranking")
    _add_common(p); _add_data_flags(p)
    p.set_defaults(func=cmd_rank_features)

    p = sub.add_parser("crossval", help="stratified k-fold cross-validation of one model")
    _add_common(p); _add_data_flags(p); _add_training_flags(p)
    p.add_argument("--folds", type=int, help="number of folds (default 5)")
    p.add_argument("--jobs", type=int, help="parallel fold workers (default 1)")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("compare", help="cross-validate a suite of models and tabulate accuracy")
    _add_common(p); _add_data_flags(p); _add_training_flags(p)
    p.add_argument("--folds", type=int, help="number of folds (default 5)")
    p.add_argument("--jobs", type=int, help="parallel fold workers (default 1)")
    p.add_argument("--models", help="comma-separated subset of models (default: all six)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench-optimizer", help="run the optimizers on classic test functions")
    _add_common(p)
    p.add_argument("--function", choices=sorted(BENCHMARKS), help="test function (default sphere)")
    p.add_argument("--variant", choices=["standard", "modified", "both"],
                   help="optimizer variant (default both)")
    p.add_argument("--dimension", type=int, help="problem dimension (default 10)")
    p.add_argument("--agents", type=int, help="population size (default 30)")
    p.add_argument("--iterations", type=int, help="iterations (default 500)")
    p.add_argument("--runs", type=int, help="independent seeded runs (default 10)")
    p.set_defaults(func=cmd_bench_optimizer)

    p = sub.add_parser("train", help="train one model on the full dataset and persist it")
    _add_common(p); _add_data_flags(p); _add_training_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score a CSV with a persisted model")
    _add_common(p); _add_data_flags(p)
    p.add_argument("--model-file", help="persisted model path")
    p.set_defaults(func=cmd_predict)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (WolfnetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
