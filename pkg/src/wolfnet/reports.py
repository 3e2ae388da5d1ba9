"""Report serialization: JSON/CSV/text artifacts written atomically.

Everything here is deterministic for identical inputs (sorted keys, repr
floats, no timestamps) so that re-running a command reproduces its output
files byte for byte.
"""

from __future__ import annotations

import json
import os
import tempfile

from .metrics import roc
from .training import ComparisonRow, CrossValResult, FoldResult


def atomic_write(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_json(document) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def fold_document(result: FoldResult) -> dict:
    """One fold's record, numbered from 1 as in the run summaries."""
    return {
        "fold_no": result.fold + 1,
        "train_size": result.train_size,
        "test_size": result.test_size,
        "train_mse": result.train_mse,
        "train_rate": result.train_rate,
        "test_mse": result.test_mse,
        "test_rate": result.test_rate,
        "confusion": result.confusion.as_dict(),
        "metrics": result.metric_set.as_dict(),
        "auc": result.auc,
        "class_counts": {
            "pass": result.confusion.tp + result.confusion.fn,
            "pass_correct": result.confusion.tp,
            "fail": result.confusion.tn + result.confusion.fp,
            "fail_correct": result.confusion.tn,
        },
    }


def crossval_document(model_name: str, connections: int, result: CrossValResult) -> dict:
    return {
        "model_name": model_name,
        "connections": connections,
        "folds": [fold_document(f) for f in result.folds],
        "averages": result.averages,
    }


def comparison_document(rows) -> dict:
    ordered = sorted(rows, key=lambda r: (-r.mean_test_accuracy, r.model_name))
    return {
        "models": [
            {
                "model_name": r.model_name,
                "connections": r.connections,
                "mean_test_accuracy": r.mean_test_accuracy,
                "mean_test_mse": r.mean_test_mse,
                "mean_auc": r.mean_auc,
                "fold_accuracies": list(r.fold_accuracies),
            }
            for r in ordered
        ]
    }


def comparison_text(rows) -> str:
    """Aligned table, accuracy descending."""
    ordered = sorted(rows, key=lambda r: (-r.mean_test_accuracy, r.model_name))
    header = ("model", "connections", "mean_test_accuracy", "mean_auc")
    body = [
        (
            r.model_name,
            str(r.connections),
            f"{r.mean_test_accuracy:.4f}",
            "-" if r.mean_auc is None else f"{r.mean_auc:.4f}",
        )
        for r in ordered
    ]
    widths = [max(len(h), *(len(row[i]) for row in body)) for i, h in enumerate(header)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in body]
    return "\n".join(lines) + "\n"


def write_crossval_reports(out_dir, model_name, connections, result: CrossValResult) -> list:
    """Write folds.json plus per-fold ROC and convergence CSVs; returns paths."""
    written = []

    def emit(name, text):
        path = os.path.join(out_dir, name)
        atomic_write(path, text)
        written.append(path)

    emit("folds.json", to_json(crossval_document(model_name, connections, result)))
    for f in result.folds:
        emit(f"trace_fold{f.fold + 1}.csv", f.trace.to_csv())
        try:
            curve = roc(f.scores, f.test_labels)
        except ValueError:
            continue  # single-class fold: no curve to write
        emit(f"roc_fold{f.fold + 1}.csv", curve.to_csv())
    return written
