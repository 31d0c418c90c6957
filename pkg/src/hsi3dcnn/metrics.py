"""Confusion-matrix evaluation: OA, AA, Cohen's kappa, per-class P/R/F1.

Rows are ground truth, columns are predictions (stated in every report).
Ratios are computed from exact integer counts and divided once at the end,
so e.g. kappa of ((40,10),(20,30)) is exactly 0.4 in float64.

Report file: ``# key=value`` config echo lines, then ``oa``/``aa``/``kappa``
and ``class_<k>_precision/recall/f1`` as ``key: value`` lines, then the raw
count matrix as comma-separated integer rows.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MetricsError


@dataclass
class ConfusionMatrix:
    """C x C integer count grid; counts[t][p] = truth t predicted as p."""

    counts: np.ndarray

    @property
    def c(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def accumulate(truth, pred, c: int) -> ConfusionMatrix:
    """Count (truth, prediction) pairs of 0-based class ids into a matrix."""
    truth = np.asarray(truth, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if truth.shape != pred.shape or truth.ndim != 1:
        raise MetricsError(f"truth/pred lengths differ: {truth.shape} vs {pred.shape}")
    if truth.size and (truth.min() < 0 or pred.min() < 0
                       or truth.max() >= c or pred.max() >= c):
        raise MetricsError(f"class id outside 0..{c - 1}")
    counts = np.zeros((c, c), dtype=np.int64)
    np.add.at(counts, (truth, pred), 1)
    return ConfusionMatrix(counts=counts)


def merge(a: ConfusionMatrix, b: ConfusionMatrix) -> ConfusionMatrix:
    if a.c != b.c:
        raise MetricsError(f"cannot merge {a.c}x{a.c} with {b.c}x{b.c}")
    return ConfusionMatrix(counts=a.counts + b.counts)


def _require_total(cm: ConfusionMatrix) -> int:
    total = cm.total
    if total <= 0:
        raise MetricsError("empty confusion matrix")
    return total


def overall_accuracy(cm: ConfusionMatrix) -> float:
    """Correct predictions over all predictions: trace/total."""
    total = _require_total(cm)
    return int(np.trace(cm.counts)) / total


def average_accuracy(cm: ConfusionMatrix):
    """Mean of per-class recalls; classes with empty rows are excluded.

    Returns (aa, n_empty_rows).
    """
    _require_total(cm)
    rows = cm.counts.sum(axis=1)
    present = rows > 0
    recalls = [int(cm.counts[k, k]) / int(rows[k]) for k in range(cm.c) if present[k]]
    return float(np.mean(recalls)), int((~present).sum())


def kappa(cm: ConfusionMatrix) -> float:
    """Chance-corrected agreement (p_o - p_e) / (1 - p_e).

    Evaluated as (total*trace - S) / (total^2 - S) with S = sum of
    row_i*col_i over exact integers, one final division.  The degenerate
    p_e = 1 case (a single nonzero row/col pair) is 1.0 for perfect
    agreement and 0.0 otherwise.
    """
    total = _require_total(cm)
    rows = cm.counts.sum(axis=1).astype(object)
    cols = cm.counts.sum(axis=0).astype(object)
    s = int(sum(r * c for r, c in zip(rows, cols)))
    trace = int(np.trace(cm.counts))
    num = total * trace - s
    den = total * total - s
    if den == 0:
        return 1.0 if trace == total else 0.0
    return num / den


def per_class_prf(cm: ConfusionMatrix):
    """Per-class (precision, recall, f1, zero_denominator_flag) plus macro
    averages as a dict with keys 'precision', 'recall', 'f1'.

    A zero denominator (class never predicted / never present) yields 0.0
    with the flag set, and still participates in the macro averages.
    """
    _require_total(cm)
    rows = cm.counts.sum(axis=1)
    cols = cm.counts.sum(axis=0)
    per_class = []
    for k in range(cm.c):
        diag = int(cm.counts[k, k])
        flagged = rows[k] == 0 or cols[k] == 0
        precision = diag / int(cols[k]) if cols[k] > 0 else 0.0
        recall = diag / int(rows[k]) if rows[k] > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class.append((precision, recall, f1, bool(flagged)))
    macro = {
        "precision": float(np.mean([p for p, _, _, _ in per_class])),
        "recall": float(np.mean([r for _, r, _, _ in per_class])),
        "f1": float(np.mean([f for _, _, f, _ in per_class])),
    }
    return per_class, macro


def report_text(cm: ConfusionMatrix, header_lines=()) -> str:
    """Full plain-text report: metrics as key: value, then the raw counts."""
    oa = overall_accuracy(cm)
    aa, n_empty = average_accuracy(cm)
    per_class, macro = per_class_prf(cm)
    lines = [f"# {line}" for line in header_lines]
    lines.append("# rows = ground truth, columns = prediction")
    if n_empty:
        lines.append(f"# warning: {n_empty} class(es) with no test samples excluded from aa")
    lines.append(f"oa: {oa!r}")
    lines.append(f"aa: {aa!r}")
    lines.append(f"kappa: {kappa(cm)!r}")
    for k, (p, r, f1, flagged) in enumerate(per_class, start=1):
        suffix = "  # zero-denominator" if flagged else ""
        lines.append(f"class_{k}_precision: {p!r}{suffix}")
        lines.append(f"class_{k}_recall: {r!r}")
        lines.append(f"class_{k}_f1: {f1!r}")
    lines.append(f"macro_precision: {macro['precision']!r}")
    lines.append(f"macro_recall: {macro['recall']!r}")
    lines.append(f"macro_f1: {macro['f1']!r}")
    lines.append("confusion_matrix:")
    for row in cm.counts:
        lines.append(",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def percent(x: float) -> str:
    """Human display: percentage with 2 decimals, e.g. 0.97753 -> '97.75'."""
    return f"{100.0 * x:.2f}"
