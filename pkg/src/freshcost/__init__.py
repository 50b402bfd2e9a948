"""Cost-sensitive evaluation toolkit for freshness classifiers.

Derives misclassification-cost matrices from declarative business
assumptions, evaluates and ranks classifiers by the money their mistakes
cost, validates every analytic expectation against a seeded Monte-Carlo
simulator, and profiles class-folder image datasets.
"""

from .cost_model import (
    ActionSpec,
    BusinessAssumptions,
    FreshnessClass,
    MccMatrix,
    Recommendation,
    Violation,
    expected_gain,
    expected_loss,
    format_money,
    mcc_cell,
    mcc_matrix,
    net_cost,
    paper_defaults,
    recommend_action,
    round_money,
    validate_assumptions,
)
from .errors import DataError, FreshcostError, ParseError, ValidationError
from .evaluation import (
    ConfusionMatrix,
    MetricsReport,
    PredictionRecord,
    accuracy,
    confusion_from_records,
    cumulative_mcc,
    evaluate,
    macro_precision,
    macro_recall,
    rank_models,
)
from .simulator import (
    SimItem,
    SimOutcome,
    SimSummary,
    estimate_mcc_empirical,
    simulate_day,
    simulate_item,
)

__version__ = "0.1.0"
