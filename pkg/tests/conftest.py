from __future__ import annotations

import pytest

from freshcost.cost_model import BusinessAssumptions, paper_defaults
from freshcost.prediction_io import default_assumptions_path


@pytest.fixture
def defaults() -> BusinessAssumptions:
    return paper_defaults()


@pytest.fixture
def defaults_path():
    return default_assumptions_path()
