"""Seeded Monte-Carlo simulation of per-item sale and incident outcomes.

This is the brute-force counterpart to the analytic cost model: each
simulated item draws a purchase, fires an incident when a purchased item
is hazardous, and books the realized regret against the net cost of
handling the item correctly. The mean realized regret over many draws is
an unbiased estimate of the corresponding cost-matrix cell.

Determinism contract
--------------------
All randomness comes from Philox counter-based generators keyed on the
caller's 64-bit seed plus a documented sub-stream word:

* ``estimate_mcc_empirical`` uses one stream per cell,
  key = ``(seed, actual * K + predicted)``.
* ``simulate_day`` gives item ``i`` its own stream, key = ``(seed, i)``,
  so serial and parallel execution agree bit for bit; aggregate sums use
  numpy's pairwise reduction over the per-item array in index order.

Identical seeds and inputs therefore produce identical outcome streams
and summaries, byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.random import Generator, Philox

from .cost_model import BusinessAssumptions, net_cost

__all__ = [
    "SimItem",
    "SimOutcome",
    "SimSummary",
    "item_stream",
    "simulate_item",
    "estimate_mcc_empirical",
    "simulate_day",
]

_U64 = 2**64


@dataclass(frozen=True)
class SimItem:
    """One item to push through a simulated day: its true and predicted class."""

    actual: int
    predicted: int


@dataclass(frozen=True)
class SimOutcome:
    """What happened to one simulated item."""

    purchased: bool
    incident: bool
    revenue: float
    incident_cost_incurred: float
    realized_regret: float


@dataclass(frozen=True)
class SimSummary:
    """Aggregate over n simulated items or repetitions."""

    n: int
    mean_realized_regret: float
    std_error: float
    total_revenue: float
    incident_count: int
    seed: int


def _check_seed(seed: int) -> int:
    if not 0 <= seed < _U64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _stream(seed: int, sub: int) -> Generator:
    return Generator(Philox(key=np.array([seed, sub], dtype=np.uint64)))


def item_stream(seed: int, index: int) -> Generator:
    """The documented per-item sub-stream: Philox keyed on (seed, index)."""
    return _stream(_check_seed(seed), index)


def _check_item(a: BusinessAssumptions, item: SimItem) -> None:
    if not 0 <= item.actual < a.n_classes:
        raise ValueError(f"actual class index {item.actual} out of range")
    if not 0 <= item.predicted < a.n_classes:
        raise ValueError(f"predicted class index {item.predicted} out of range")


def simulate_item(
    a: BusinessAssumptions,
    item: SimItem,
    rng: Generator,
    incident_probability: float = 1.0,
) -> SimOutcome:
    """Simulate one item: its predicted class sets the action, the actual class
    sets the purchase probability and hazard.

    The regret baseline is the analytic net cost of handling the item
    correctly, so the expected realized regret equals the cost-matrix
    cell for (actual, predicted). A purchase probability of 0 or 1 leaves
    nothing to chance; the outcome is then identical for every seed.
    """
    _check_item(a, item)
    action = a.policy[item.predicted]
    p = a.purchase_prob[item.actual][action]
    if p <= 0.0:
        purchased = False
    elif p >= 1.0:
        purchased = True
    else:
        purchased = bool(rng.random() < p)
    incident = False
    if purchased and a.hazard[item.actual]:
        if incident_probability >= 1.0:
            incident = True
        elif incident_probability > 0.0:
            incident = bool(rng.random() < incident_probability)
    revenue = a.actions[action].price if purchased else 0.0
    incident_cost_incurred = a.incident_cost if incident else 0.0
    baseline = net_cost(a, item.actual, a.policy[item.actual])
    realized = incident_cost_incurred - revenue
    return SimOutcome(
        purchased=purchased,
        incident=incident,
        revenue=revenue,
        incident_cost_incurred=incident_cost_incurred,
        realized_regret=realized - baseline,
    )


def estimate_mcc_empirical(
    a: BusinessAssumptions,
    actual: int,
    predicted: int,
    n: int,
    seed: int,
    incident_probability: float = 1.0,
) -> SimSummary:
    """Monte-Carlo estimate of one cost-matrix cell from n independent items.

    Vectorized over one cell-keyed sub-stream (see module docstring).
    When the cell has no randomness (purchase probability 0 or 1 with a
    certain incident) the exact constant is returned with zero standard
    error.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_seed(seed)
    _check_item(a, SimItem(actual, predicted))
    action = a.policy[predicted]
    p = a.purchase_prob[actual][action]
    price = a.actions[action].price
    hazard = a.hazard[actual]
    baseline = net_cost(a, actual, a.policy[actual])

    deterministic = p <= 0.0 or (
        p >= 1.0 and (not hazard or incident_probability in (0.0, 1.0))
    )
    if deterministic:
        purchased = p >= 1.0
        incident = purchased and hazard and incident_probability >= 1.0
        revenue = price if purchased else 0.0
        regret = (a.incident_cost if incident else 0.0) - revenue - baseline
        return SimSummary(
            n=n,
            mean_realized_regret=regret,
            std_error=0.0,
            total_revenue=revenue * n,
            incident_count=n if incident else 0,
            seed=seed,
        )

    rng = _stream(seed, actual * a.n_classes + predicted)
    purchased = rng.random(n) < p
    if hazard and 0.0 < incident_probability < 1.0:
        incident = purchased & (rng.random(n) < incident_probability)
    elif hazard and incident_probability >= 1.0:
        incident = purchased
    else:
        incident = np.zeros(n, dtype=bool)
    regrets = incident * a.incident_cost - purchased * price - baseline
    mean = float(regrets.mean())
    std_error = float(regrets.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return SimSummary(
        n=n,
        mean_realized_regret=mean,
        std_error=std_error,
        total_revenue=float((purchased * price).sum()),
        incident_count=int(incident.sum()),
        seed=seed,
    )


def simulate_day(
    a: BusinessAssumptions,
    items: Sequence[SimItem],
    seed: int,
    incident_probability: float = 1.0,
) -> tuple[SimSummary, list[SimOutcome]]:
    """Simulate one business day over a fixed prediction pattern.

    The total realized regret estimates the day's cumulative
    misclassification cost. Item ``i`` draws from its own sub-stream, so
    the result is independent of evaluation order.
    """
    if not items:
        raise ValueError("need at least one item to simulate a day")
    _check_seed(seed)
    outcomes = [
        simulate_item(a, item, item_stream(seed, i), incident_probability)
        for i, item in enumerate(items)
    ]
    regrets = np.array([o.realized_regret for o in outcomes])
    revenues = np.array([o.revenue for o in outcomes])
    n = len(outcomes)
    summary = SimSummary(
        n=n,
        mean_realized_regret=float(regrets.sum() / n),
        std_error=float(regrets.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0,
        total_revenue=float(revenues.sum()),
        incident_count=sum(o.incident for o in outcomes),
        seed=seed,
    )
    return summary, outcomes
