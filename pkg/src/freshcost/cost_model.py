"""Misclassification-cost model for freshness-graded retail items.

Business assumptions (classes, selling actions, purchase probabilities,
hazard flags, incident cost) are declared up front; everything else is
derived: per-cell misclassification costs (expected loss from handling an
item under the wrong action, less the expected gain that action still
brings in), the full actual-by-predicted cost matrix, and expected-cost
minimizing action recommendations.

All amounts are dollars as Python floats. Display rounding (one decimal,
half away from zero) is applied only when formatting, never while
computing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "FreshnessClass",
    "ActionSpec",
    "BusinessAssumptions",
    "MccMatrix",
    "Violation",
    "Recommendation",
    "paper_defaults",
    "net_cost",
    "expected_loss",
    "expected_gain",
    "mcc_cell",
    "mcc_matrix",
    "recommend_action",
    "validate_assumptions",
    "round_money",
    "format_money",
]


@dataclass(frozen=True)
class FreshnessClass:
    """One freshness grade, e.g. FR / HF / SP."""

    name: str
    index: int


@dataclass(frozen=True)
class ActionSpec:
    """One handling action: sell at a price, or discard (price 0)."""

    name: str
    price: float
    is_discard: bool = False


@dataclass(frozen=True)
class Violation:
    """A single broken invariant, addressed by field path."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class BusinessAssumptions:
    """Declarative description of the retail scenario.

    classes:        K freshness grades, in display order.
    actions:        M handling actions.
    policy:         action index taken when class i is predicted.
    purchase_prob:  K x M; chance an item of actual class i sells under action j.
    hazard:         per-class flag; consuming a hazardous item causes an incident.
    incident_cost:  dollars incurred when an incident fires.

    Construction never validates; run :func:`validate_assumptions` (or any
    operation that requires validity) to get the violation list.
    """

    classes: tuple[FreshnessClass, ...]
    actions: tuple[ActionSpec, ...]
    policy: tuple[int, ...]
    purchase_prob: tuple[tuple[float, ...], ...]
    hazard: tuple[bool, ...]
    incident_cost: float

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    @property
    def action_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.actions)

    def class_index(self, name: str) -> int:
        for c in self.classes:
            if c.name == name:
                return c.index
        raise KeyError(f"unknown class label {name!r}")

    def action_index(self, name: str) -> int:
        for i, a in enumerate(self.actions):
            if a.name == name:
                return i
        raise KeyError(f"unknown action name {name!r}")

    def scaled(self, factor: float) -> "BusinessAssumptions":
        """Copy with every price and the incident cost multiplied by ``factor``."""
        return BusinessAssumptions(
            classes=self.classes,
            actions=tuple(
                ActionSpec(a.name, a.price * factor, a.is_discard) for a in self.actions
            ),
            policy=self.policy,
            purchase_prob=self.purchase_prob,
            hazard=self.hazard,
            incident_cost=self.incident_cost * factor,
        )


@dataclass(frozen=True)
class MccMatrix:
    """Per-(actual, predicted) misclassification cost, actual rows x predicted columns."""

    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def cell(self, actual: str, predicted: str) -> float:
        i = self.labels.index(actual)
        j = self.labels.index(predicted)
        return float(self.values[i, j])


@dataclass(frozen=True)
class Recommendation:
    """Expected-cost minimizing action for a class-probability vector."""

    action_index: int
    action_name: str
    expected_costs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.expected_costs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "expected_costs", arr)


def paper_defaults(incident_cost: float = 10_000.0) -> BusinessAssumptions:
    """The three-class meat scenario with its default prices and probabilities.

    ``incident_cost`` defaults to the 10,000 figure the published cost
    matrix was computed from; pass 100,000 to use the headline figure
    instead.
    """
    return BusinessAssumptions(
        classes=(
            FreshnessClass("FR", 0),
            FreshnessClass("HF", 1),
            FreshnessClass("SP", 2),
        ),
        actions=(
            ActionSpec("sell-full", 10.0, False),
            ActionSpec("sell-discount", 5.0, False),
            ActionSpec("discard", 0.0, True),
        ),
        policy=(0, 1, 2),
        purchase_prob=(
            (0.90, 1.00, 0.0),
            (0.10, 0.90, 0.0),
            (0.01, 0.05, 0.0),
        ),
        hazard=(False, False, True),
        incident_cost=incident_cost,
    )


def _check_class_index(a: BusinessAssumptions, i: int, what: str) -> None:
    if not 0 <= i < a.n_classes:
        raise ValueError(f"{what} index {i} out of range [0, {a.n_classes})")


def _check_action_index(a: BusinessAssumptions, j: int) -> None:
    if not 0 <= j < a.n_actions:
        raise ValueError(f"action index {j} out of range [0, {a.n_actions})")


def net_cost(a: BusinessAssumptions, actual: int, action: int) -> float:
    """Expected net cost of handling an item of ``actual`` class under ``action``.

    Incident exposure minus sales revenue, both weighted by the purchase
    probability. Negative values are expected revenue.
    """
    _check_class_index(a, actual, "class")
    _check_action_index(a, action)
    p = a.purchase_prob[actual][action]
    exposure = a.incident_cost * p if a.hazard[actual] else 0.0
    return exposure - a.actions[action].price * p


def expected_loss(a: BusinessAssumptions, actual: int, predicted: int) -> float:
    """Expected loss of predicting ``predicted`` for an item of ``actual`` class.

    Zero on a correct prediction. For a hazardous actual class the loss is
    the incident exposure under the action the wrong prediction triggers;
    otherwise it is the revenue the correct handling would have brought in.
    """
    _check_class_index(a, actual, "actual class")
    _check_class_index(a, predicted, "predicted class")
    if predicted == actual:
        return 0.0
    if a.hazard[actual]:
        taken = a.policy[predicted]
        return a.incident_cost * a.purchase_prob[actual][taken]
    correct = a.policy[actual]
    return a.actions[correct].price * a.purchase_prob[actual][correct]


def expected_gain(a: BusinessAssumptions, actual: int, predicted: int) -> float:
    """Expected revenue the wrong prediction's action still earns."""
    _check_class_index(a, actual, "actual class")
    _check_class_index(a, predicted, "predicted class")
    if predicted == actual:
        return 0.0
    taken = a.policy[predicted]
    return a.actions[taken].price * a.purchase_prob[actual][taken]


def mcc_cell(a: BusinessAssumptions, actual: int, predicted: int) -> float:
    """Misclassification cost: expected loss less expected gain.

    When every hazard class maps to a discard action this equals the
    regret ``net_cost(actual, policy(predicted)) - net_cost(actual,
    policy(actual))``.
    """
    return expected_loss(a, actual, predicted) - expected_gain(a, actual, predicted)


def mcc_matrix(a: BusinessAssumptions) -> MccMatrix:
    """Full K x K misclassification-cost matrix; diagonal exactly zero."""
    violations = validate_assumptions(a)
    if violations:
        raise ValidationError(violations)
    k = a.n_classes
    values = np.zeros((k, k), dtype=float)
    for i in range(k):
        for j in range(k):
            if i != j:
                values[i, j] = mcc_cell(a, i, j)
    return MccMatrix(values=values, labels=a.class_names)


def recommend_action(
    a: BusinessAssumptions, class_probabilities: Sequence[float]
) -> Recommendation:
    """Pick the action minimizing expected net cost under a class belief.

    Ties break toward the lowest action index. The full expected-cost
    vector is returned for reporting.
    """
    probs = np.asarray(class_probabilities, dtype=float)
    if probs.shape != (a.n_classes,):
        raise ValueError(
            f"probability vector must have length {a.n_classes}, got shape {probs.shape}"
        )
    if np.any(probs < 0) or np.any(~np.isfinite(probs)):
        raise ValueError("probabilities must be finite and >= 0")
    if abs(float(probs.sum()) - 1.0) > 1e-6:
        raise ValueError(f"probabilities must sum to 1 (got {probs.sum()!r})")
    costs = np.array(
        [
            sum(probs[i] * net_cost(a, i, j) for i in range(a.n_classes))
            for j in range(a.n_actions)
        ]
    )
    best = int(np.argmin(costs))  # argmin returns the first minimum
    return Recommendation(
        action_index=best, action_name=a.actions[best].name, expected_costs=costs
    )


def validate_assumptions(a: BusinessAssumptions) -> list[Violation]:
    """Report every broken invariant; an empty list means valid."""
    out: list[Violation] = []
    k, m = a.n_classes, a.n_actions

    if k < 2:
        out.append(Violation("classes", f"need at least 2 classes, got {k}"))
    if m < 2:
        out.append(Violation("actions", f"need at least 2 actions, got {m}"))

    seen = set()
    for i, c in enumerate(a.classes):
        if c.name in seen:
            out.append(Violation(f"classes[{i}].name", f"duplicate label {c.name!r}"))
        seen.add(c.name)
        if c.index != i:
            out.append(
                Violation(f"classes[{i}].index", f"expected {i}, got {c.index}")
            )

    seen = set()
    for j, act in enumerate(a.actions):
        if act.name in seen:
            out.append(Violation(f"actions[{j}].name", f"duplicate name {act.name!r}"))
        seen.add(act.name)
        if not (act.price >= 0) or not math.isfinite(act.price):
            out.append(
                Violation(f"actions[{j}].price", f"must be finite and >= 0, got {act.price!r}")
            )
        if act.is_discard and act.price != 0:
            out.append(
                Violation(f"actions[{j}].price", "discard actions must have price 0")
            )

    if len(a.purchase_prob) != k:
        out.append(
            Violation("purchase_prob", f"need {k} rows, got {len(a.purchase_prob)}")
        )
    else:
        for i, row in enumerate(a.purchase_prob):
            if len(row) != m:
                out.append(
                    Violation(f"purchase_prob[{i}]", f"need {m} entries, got {len(row)}")
                )
                continue
            for j, p in enumerate(row):
                if not (0.0 <= p <= 1.0):
                    out.append(
                        Violation(f"purchase_prob[{i}][{j}]", f"must be in [0, 1], got {p!r}")
                    )
                elif a.actions[j].is_discard and p != 0:
                    out.append(
                        Violation(
                            f"purchase_prob[{i}][{j}]",
                            "discard columns must be 0 (nothing discarded is bought)",
                        )
                    )

    if len(a.hazard) != k:
        out.append(Violation("hazard", f"need {k} flags, got {len(a.hazard)}"))

    if len(a.policy) != k:
        out.append(Violation("policy", f"need an action for all {k} classes, got {len(a.policy)}"))
    else:
        for i, j in enumerate(a.policy):
            label = a.classes[i].name if i < len(a.classes) else str(i)
            if not 0 <= j < m:
                out.append(
                    Violation(f"policy[{label}]", f"action index {j} out of range [0, {m})")
                )
            elif i < len(a.hazard) and a.hazard[i] and not a.actions[j].is_discard:
                out.append(
                    Violation(
                        f"policy[{label}]",
                        "hazard classes must map to a discard action",
                    )
                )

    if not (a.incident_cost >= 0) or not math.isfinite(a.incident_cost):
        out.append(
            Violation("incident_cost", f"must be finite and >= 0, got {a.incident_cost!r}")
        )

    return out


def round_money(x: float, decimals: int = 1) -> float:
    """Round half away from zero, e.g. 499.75 -> 499.8 at one decimal."""
    q = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP))


def format_money(x: float, decimals: int = 1) -> str:
    """Format a dollar amount with display rounding and thousands separators."""
    q = Decimal(1).scaleb(-decimals)
    d = Decimal(repr(float(x))).quantize(q, rounding=ROUND_HALF_UP)
    return f"{d:,f}"
