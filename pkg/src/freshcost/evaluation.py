"""Classification metrics and cumulative misclassification cost.

Everything is computed from one confusion matrix (actual rows, predicted
columns) so the numbers in a report are mutually consistent by
construction. Models are ranked by cumulative cost first, accuracy
second: the cheapest model wins even when a rival is more accurate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .cost_model import BusinessAssumptions, MccMatrix, mcc_matrix
from .errors import DataError

__all__ = [
    "PredictionRecord",
    "ConfusionMatrix",
    "MetricsReport",
    "confusion_from_records",
    "accuracy",
    "per_class_precision",
    "per_class_recall",
    "macro_precision",
    "macro_recall",
    "cumulative_mcc",
    "evaluate",
    "rank_models",
]


@dataclass(frozen=True)
class PredictionRecord:
    """One labeled classifier output for one item."""

    item_id: str
    actual: str
    predicted: str
    probabilities: tuple[float, ...] | None = None
    model_id: str | None = None


@dataclass(frozen=True)
class ConfusionMatrix:
    """Integer counts, actual rows x predicted columns."""

    counts: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"counts must be square, got shape {arr.shape}")
        if arr.shape[0] != len(self.labels):
            raise ValueError(
                f"{len(self.labels)} labels for a {arr.shape[0]}x{arr.shape[1]} matrix"
            )
        if np.any(arr < 0):
            raise ValueError("counts must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.counts))


@dataclass(frozen=True)
class MetricsReport:
    """All metrics for one model, derived from a single confusion matrix."""

    model_id: str
    labels: tuple[str, ...]
    confusion: ConfusionMatrix
    accuracy: float
    macro_precision: float
    macro_recall: float
    per_class_precision: tuple[float, ...]
    per_class_recall: tuple[float, ...]
    cumulative_mcc: float
    per_cell_mcc: np.ndarray
    mcc: MccMatrix
    flags: tuple[str, ...] = ()
    rank: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.per_cell_mcc, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "per_cell_mcc", arr)

    def with_rank(self, rank: int) -> "MetricsReport":
        return replace(self, rank=rank)


def confusion_from_records(
    records: Sequence[PredictionRecord], classes: Sequence[str]
) -> ConfusionMatrix:
    """Tally records into a confusion matrix; order of records is irrelevant."""
    labels = tuple(classes)
    index = {name: i for i, name in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for rec in records:
        if rec.actual not in index:
            raise DataError(
                f"record {rec.item_id!r}: unknown actual label {rec.actual!r} "
                f"(classes: {', '.join(labels)})"
            )
        if rec.predicted not in index:
            raise DataError(
                f"record {rec.item_id!r}: unknown predicted label {rec.predicted!r} "
                f"(classes: {', '.join(labels)})"
            )
        counts[index[rec.actual], index[rec.predicted]] += 1
    return ConfusionMatrix(counts=counts, labels=labels)


def _require_nonempty(cm: ConfusionMatrix) -> None:
    if cm.total == 0:
        raise ValueError("confusion matrix is empty (zero records)")


def accuracy(cm: ConfusionMatrix) -> float:
    """Fraction of correct predictions: trace / total."""
    _require_nonempty(cm)
    return cm.trace / cm.total


def per_class_precision(cm: ConfusionMatrix) -> np.ndarray:
    """diag / column sums; classes never predicted contribute 0."""
    col = cm.counts.sum(axis=0)
    diag = np.diagonal(cm.counts)
    return np.divide(diag, col, out=np.zeros(len(col)), where=col > 0)


def per_class_recall(cm: ConfusionMatrix) -> np.ndarray:
    """diag / row sums; classes with no actual items contribute 0."""
    row = cm.counts.sum(axis=1)
    diag = np.diagonal(cm.counts)
    return np.divide(diag, row, out=np.zeros(len(row)), where=row > 0)


def macro_precision(cm: ConfusionMatrix) -> float:
    """Unweighted mean of per-class precision."""
    _require_nonempty(cm)
    return float(per_class_precision(cm).mean())


def macro_recall(cm: ConfusionMatrix) -> float:
    """Unweighted mean of per-class recall."""
    _require_nonempty(cm)
    return float(per_class_recall(cm).mean())


def cumulative_mcc(cm: ConfusionMatrix, mcc: MccMatrix) -> tuple[float, np.ndarray]:
    """Total cost of a prediction batch plus the per-cell breakdown.

    Returns ``(total, per_cell)`` where ``per_cell[i][j] = counts[i][j] *
    mcc[i][j]`` and the total is their sum.
    """
    if cm.counts.shape != mcc.values.shape:
        raise ValueError(
            f"shape mismatch: confusion {cm.counts.shape} vs cost matrix {mcc.values.shape}"
        )
    if cm.labels != mcc.labels:
        raise ValueError(f"label mismatch: {cm.labels} vs {mcc.labels}")
    per_cell = cm.counts * mcc.values
    return float(per_cell.sum()), per_cell


def _zero_denominator_flags(cm: ConfusionMatrix) -> list[str]:
    flags = []
    col = cm.counts.sum(axis=0)
    row = cm.counts.sum(axis=1)
    for i, name in enumerate(cm.labels):
        if col[i] == 0:
            flags.append(f"precision undefined for {name} (never predicted); counted as 0")
        if row[i] == 0:
            flags.append(f"recall undefined for {name} (no actual items); counted as 0")
    return flags


def evaluate(
    data: Sequence[PredictionRecord] | ConfusionMatrix,
    assumptions: BusinessAssumptions,
    model_id: str = "model",
) -> MetricsReport:
    """Full metrics report for one model from records or a ready confusion matrix."""
    mcc = mcc_matrix(assumptions)
    if isinstance(data, ConfusionMatrix):
        if data.labels != assumptions.class_names:
            raise DataError(
                f"confusion labels {data.labels} do not match assumption "
                f"classes {assumptions.class_names}"
            )
        cm = data
    else:
        cm = confusion_from_records(data, assumptions.class_names)
    _require_nonempty(cm)
    total, per_cell = cumulative_mcc(cm, mcc)
    return MetricsReport(
        model_id=model_id,
        labels=cm.labels,
        confusion=cm,
        accuracy=accuracy(cm),
        macro_precision=macro_precision(cm),
        macro_recall=macro_recall(cm),
        per_class_precision=tuple(per_class_precision(cm)),
        per_class_recall=tuple(per_class_recall(cm)),
        cumulative_mcc=total,
        per_cell_mcc=per_cell,
        mcc=mcc,
        flags=tuple(_zero_denominator_flags(cm)),
    )


def rank_models(reports: Sequence[MetricsReport]) -> list[MetricsReport]:
    """Order ascending by cumulative cost; ties by higher accuracy, then model id.

    Each returned report carries its 1-based rank.
    """
    if not reports:
        raise ValueError("need at least one report to rank")
    ordered = sorted(
        reports, key=lambda r: (r.cumulative_mcc, -r.accuracy, r.model_id)
    )
    return [r.with_rank(i + 1) for i, r in enumerate(ordered)]
