"""Interchange formats: assumptions documents, prediction files, report documents.

Prediction files are JSON-lines: an optional header object carrying
``schema_version``, ``classes`` and ``model_id``, then one record object
per line. Byte-level examples live in ``docs/formats.md``. All parse
errors carry their location; unknown schema versions are rejected, never
guessed at.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .cost_model import (
    ActionSpec,
    BusinessAssumptions,
    FreshnessClass,
    MccMatrix,
    validate_assumptions,
)
from .errors import DataError, ParseError, ValidationError
from .evaluation import ConfusionMatrix, MetricsReport, PredictionRecord

__all__ = [
    "PREDICTION_SCHEMA_VERSION",
    "PredictionSet",
    "default_assumptions_path",
    "load_assumptions",
    "write_assumptions",
    "read_predictions",
    "write_predictions",
    "read_confusion",
    "write_confusion",
    "stub_records",
    "write_report",
    "read_report",
]

PREDICTION_SCHEMA_VERSION = 1

_PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class PredictionSet:
    """One classifier's outputs as read from a prediction file."""

    records: tuple[PredictionRecord, ...]
    classes: tuple[str, ...] | None = None
    model_id: str | None = None
    schema_version: int | None = None


def default_assumptions_path() -> Path:
    """The shipped assumptions document reproducing the default scenario."""
    return Path(resources.files("freshcost").joinpath("data/paper_defaults.json"))


def _load_json(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc


def _field(doc: dict, key: str, kind, path: Path, where: str = ""):
    label = f"{where}{key}"
    if key not in doc:
        raise ParseError(f"missing field {label!r}", path=path)
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"field {label!r} must be a number", path=path)
        return float(value)
    if not isinstance(value, kind):
        raise ParseError(f"field {label!r} must be {kind.__name__}", path=path)
    return value


def load_assumptions(path: str | Path) -> BusinessAssumptions:
    """Parse and fully validate an assumptions document.

    Parse problems raise :class:`ParseError` with a location; a document
    that parses but breaks invariants raises :class:`ValidationError`
    listing every violation.
    """
    path = Path(path)
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", path=path)

    raw_classes = _field(doc, "classes", list, path)
    classes = tuple(
        FreshnessClass(name=_field(c, "name", str, path, f"classes[{i}]."), index=i)
        for i, c in enumerate(raw_classes)
    )
    raw_actions = _field(doc, "actions", list, path)
    actions = tuple(
        ActionSpec(
            name=_field(a, "name", str, path, f"actions[{j}]."),
            price=_field(a, "price", float, path, f"actions[{j}]."),
            is_discard=bool(a.get("is_discard", False)),
        )
        for j, a in enumerate(raw_actions)
    )
    raw_policy = _field(doc, "policy", dict, path)
    class_names = [c.name for c in classes]
    action_names = [a.name for a in actions]
    policy = []
    for name in class_names:
        if name not in raw_policy:
            raise ParseError(f"policy is missing class {name!r}", path=path)
        target = raw_policy[name]
        if target not in action_names:
            raise ParseError(
                f"policy[{name!r}] names unknown action {target!r}", path=path
            )
        policy.append(action_names.index(target))
    for name in raw_policy:
        if name not in class_names:
            raise ParseError(f"policy names unknown class {name!r}", path=path)

    raw_prob = _field(doc, "purchase_prob", list, path)
    rows = []
    for i, row in enumerate(raw_prob):
        if not isinstance(row, list):
            raise ParseError(f"purchase_prob[{i}] must be an array", path=path)
        for j, p in enumerate(row):
            if isinstance(p, bool) or not isinstance(p, (int, float)):
                raise ParseError(f"purchase_prob[{i}][{j}] must be a number", path=path)
        rows.append(tuple(float(p) for p in row))
    purchase_prob = tuple(rows)
    raw_hazard = _field(doc, "hazard", list, path)
    hazard = tuple(bool(h) for h in raw_hazard)
    incident_cost = _field(doc, "incident_cost", float, path)

    assumptions = BusinessAssumptions(
        classes=classes,
        actions=actions,
        policy=tuple(policy),
        purchase_prob=purchase_prob,
        hazard=hazard,
        incident_cost=incident_cost,
    )
    violations = validate_assumptions(assumptions)
    if violations:
        raise ValidationError(violations)
    return assumptions


def write_assumptions(a: BusinessAssumptions, path: str | Path) -> Path:
    path = Path(path)
    doc = {
        "classes": [{"name": c.name} for c in a.classes],
        "actions": [
            {"name": act.name, "price": act.price, "is_discard": act.is_discard}
            for act in a.actions
        ],
        "policy": {c.name: a.actions[a.policy[c.index]].name for c in a.classes},
        "purchase_prob": [list(row) for row in a.purchase_prob],
        "hazard": list(a.hazard),
        "incident_cost": a.incident_cost,
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def _parse_record(obj: dict, lineno: int, path: Path, classes) -> PredictionRecord:
    for key in ("item_id", "actual", "predicted"):
        if key not in obj:
            raise ParseError(f"record is missing {key!r}", path=path, line=lineno)
        if not isinstance(obj[key], str):
            raise ParseError(f"{key!r} must be a string", path=path, line=lineno)
    if classes is not None:
        for key in ("actual", "predicted"):
            if obj[key] not in classes:
                raise DataError(
                    f"{path}:line {lineno}: {key} label {obj[key]!r} is not in "
                    f"the header classes {list(classes)}"
                )
    probs = None
    if obj.get("probs") is not None:
        raw = obj["probs"]
        if not isinstance(raw, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
        ):
            raise ParseError("'probs' must be a list of numbers", path=path, line=lineno)
        probs = tuple(float(v) for v in raw)
        if classes is not None and len(probs) != len(classes):
            raise ParseError(
                f"'probs' has {len(probs)} entries for {len(classes)} classes",
                path=path,
                line=lineno,
            )
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > _PROB_SUM_TOL:
            raise ParseError(
                f"'probs' must be >= 0 and sum to 1 (sum={sum(probs)!r})",
                path=path,
                line=lineno,
            )
    model_id = obj.get("model_id")
    if model_id is not None and not isinstance(model_id, str):
        raise ParseError("'model_id' must be a string", path=path, line=lineno)
    return PredictionRecord(
        item_id=obj["item_id"],
        actual=obj["actual"],
        predicted=obj["predicted"],
        probabilities=probs,
        model_id=model_id,
    )


def read_predictions(path: str | Path) -> PredictionSet:
    """Read a JSON-lines prediction file, validating every line."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from exc
    records: list[PredictionRecord] = []
    classes = None
    model_id = None
    version = None
    first_content = True
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, path=path, line=lineno, column=exc.colno) from exc
        if not isinstance(obj, dict):
            raise ParseError("each line must be a JSON object", path=path, line=lineno)
        if first_content and "schema_version" in obj:
            version = obj["schema_version"]
            if version != PREDICTION_SCHEMA_VERSION:
                raise ParseError(
                    f"unsupported schema_version {version!r} "
                    f"(supported: {PREDICTION_SCHEMA_VERSION})",
                    path=path,
                    line=lineno,
                )
            if "classes" in obj:
                if not isinstance(obj["classes"], list) or not all(
                    isinstance(c, str) for c in obj["classes"]
                ):
                    raise ParseError(
                        "'classes' must be a list of strings", path=path, line=lineno
                    )
                classes = tuple(obj["classes"])
            model_id = obj.get("model_id")
            first_content = False
            continue
        first_content = False
        records.append(_parse_record(obj, lineno, path, classes))
    return PredictionSet(
        records=tuple(records),
        classes=classes,
        model_id=model_id,
        schema_version=version,
    )


def write_predictions(
    records: Sequence[PredictionRecord],
    path: str | Path,
    classes: Sequence[str] | None = None,
    model_id: str | None = None,
) -> Path:
    """Write records as JSON-lines, with a header when classes or model_id is known."""
    path = Path(path)
    with path.open("w") as fh:
        if classes is not None or model_id is not None:
            header = {"schema_version": PREDICTION_SCHEMA_VERSION}
            if classes is not None:
                header["classes"] = list(classes)
            if model_id is not None:
                header["model_id"] = model_id
            fh.write(json.dumps(header) + "\n")
        for rec in records:
            obj = {"item_id": rec.item_id, "actual": rec.actual, "predicted": rec.predicted}
            if rec.probabilities is not None:
                obj["probs"] = list(rec.probabilities)
            if rec.model_id is not None:
                obj["model_id"] = rec.model_id
            fh.write(json.dumps(obj) + "\n")
    return path


def read_confusion(path: str | Path) -> tuple[ConfusionMatrix, str | None]:
    """Read a confusion-count document: {classes, counts, model_id?}."""
    path = Path(path)
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", path=path)
    classes = _field(doc, "classes", list, path)
    counts = _field(doc, "counts", list, path)
    try:
        cm = ConfusionMatrix(counts=np.array(counts, dtype=np.int64), labels=tuple(classes))
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc), path=path) from exc
    model_id = doc.get("model_id")
    return cm, model_id


def write_confusion(cm: ConfusionMatrix, path: str | Path, model_id: str | None = None) -> Path:
    path = Path(path)
    doc = {"classes": list(cm.labels), "counts": cm.counts.tolist()}
    if model_id is not None:
        doc["model_id"] = model_id
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def stub_records(cm: ConfusionMatrix, model_id: str | None = None) -> list[PredictionRecord]:
    """Synthesize records realizing ``cm`` exactly, with deterministic item ids.

    Tallying the result with :func:`confusion_from_records` gives back
    ``cm`` cell for cell, which is what makes trainer-free evaluation
    fixtures possible.
    """
    records = []
    for i, actual in enumerate(cm.labels):
        for j, predicted in enumerate(cm.labels):
            for k in range(int(cm.counts[i, j])):
                records.append(
                    PredictionRecord(
                        item_id=f"stub-{actual}-{predicted}-{k:05d}",
                        actual=actual,
                        predicted=predicted,
                        model_id=model_id,
                    )
                )
    return records


def _verify_report(report: MetricsReport) -> None:
    recomputed = float((report.confusion.counts * report.mcc.values).sum())
    if abs(recomputed - report.cumulative_mcc) > 1e-9 * max(1.0, abs(recomputed)):
        raise DataError(
            f"report is self-inconsistent: cumulative mcc {report.cumulative_mcc!r} "
            f"vs counts*matrix {recomputed!r}"
        )
    if report.confusion.total > 0:
        if report.accuracy != report.confusion.trace / report.confusion.total:
            raise DataError("report is self-inconsistent: accuracy != trace/total")


def write_report(report: MetricsReport, path: str | Path) -> Path:
    """Serialize a metrics report, re-verifying its identities first."""
    _verify_report(report)
    path = Path(path)
    doc = {
        "schema_version": PREDICTION_SCHEMA_VERSION,
        "model_id": report.model_id,
        "classes": list(report.labels),
        "metrics": {
            "accuracy": report.accuracy,
            "macro_precision": report.macro_precision,
            "macro_recall": report.macro_recall,
            "cumulative_mcc": report.cumulative_mcc,
        },
        "per_class": {
            "precision": list(report.per_class_precision),
            "recall": list(report.per_class_recall),
        },
        "confusion": report.confusion.counts.tolist(),
        "mcc_matrix": report.mcc.values.tolist(),
        "per_cell_mcc": report.per_cell_mcc.tolist(),
        "flags": list(report.flags),
        "rank": report.rank,
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def read_report(path: str | Path) -> MetricsReport:
    """Read a report document back, re-verifying its identities."""
    path = Path(path)
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", path=path)
    version = doc.get("schema_version")
    if version != PREDICTION_SCHEMA_VERSION:
        raise ParseError(
            f"unsupported schema_version {version!r} "
            f"(supported: {PREDICTION_SCHEMA_VERSION})",
            path=path,
        )
    labels = tuple(_field(doc, "classes", list, path))
    metrics = _field(doc, "metrics", dict, path)
    cm = ConfusionMatrix(
        counts=np.array(_field(doc, "confusion", list, path), dtype=np.int64),
        labels=labels,
    )
    report = MetricsReport(
        model_id=_field(doc, "model_id", str, path),
        labels=labels,
        confusion=cm,
        accuracy=float(metrics["accuracy"]),
        macro_precision=float(metrics["macro_precision"]),
        macro_recall=float(metrics["macro_recall"]),
        per_class_precision=tuple(doc["per_class"]["precision"]),
        per_class_recall=tuple(doc["per_class"]["recall"]),
        cumulative_mcc=float(metrics["cumulative_mcc"]),
        per_cell_mcc=np.array(_field(doc, "per_cell_mcc", list, path), dtype=float),
        mcc=MccMatrix(
            values=np.array(_field(doc, "mcc_matrix", list, path), dtype=float),
            labels=labels,
        ),
        flags=tuple(doc.get("flags", ())),
        rank=doc.get("rank"),
    )
    _verify_report(report)
    return report
