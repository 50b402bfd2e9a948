from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenario_gen import random_valid_assumptions
from freshcost.cost_model import (
    ActionSpec,
    BusinessAssumptions,
    FreshnessClass,
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
from freshcost.errors import ValidationError

FR, HF, SP = 0, 1, 2

# published matrix, exact in IEEE doubles
TABLE2 = np.array([
    [0.0, 4.0, 9.0],
    [3.5, 0.0, 4.5],
    [99.9, 499.75, 0.0],
])

# loss/gain decomposition of every cell: (price or incident cost) x probability
TABLE3 = {
    (FR, FR): (0.0, 0.0),
    (FR, HF): (10 * 0.90, 5 * 1.00),
    (FR, SP): (10 * 0.90, 0.0),
    (HF, HF): (0.0, 0.0),
    (HF, FR): (5 * 0.90, 10 * 0.10),
    (HF, SP): (5 * 0.90, 0.0),
    (SP, SP): (0.0, 0.0),
    (SP, FR): (10_000 * 0.01, 10 * 0.01),
    (SP, HF): (10_000 * 0.05, 5 * 0.05),
}


def test_net_cost_examples(defaults):
    assert net_cost(defaults, FR, 0) == pytest.approx(-9.0, abs=1e-9)
    assert net_cost(defaults, SP, 2) == 0.0
    assert net_cost(defaults, SP, 1) == pytest.approx(499.75, abs=1e-9)


def test_net_cost_rejects_bad_indices(defaults):
    with pytest.raises(ValueError):
        net_cost(defaults, 3, 0)
    with pytest.raises(ValueError):
        net_cost(defaults, 0, -1)


def test_loss_and_gain_reproduce_all_nine_cells(defaults):
    for (i, j), (loss, gain) in TABLE3.items():
        assert expected_loss(defaults, i, j) == pytest.approx(loss, abs=1e-9)
        assert expected_gain(defaults, i, j) == pytest.approx(gain, abs=1e-9)


def test_mcc_cell_examples(defaults):
    assert mcc_cell(defaults, FR, HF) == pytest.approx(4.0, abs=1e-9)
    assert mcc_cell(defaults, SP, FR) == pytest.approx(99.9, abs=1e-9)
    assert mcc_cell(defaults, SP, HF) == pytest.approx(499.75, abs=1e-9)


def test_mcc_matrix_defaults(defaults):
    m = mcc_matrix(defaults)
    assert m.labels == ("FR", "HF", "SP")
    np.testing.assert_allclose(m.values, TABLE2, atol=1e-9)
    assert np.all(np.diagonal(m.values) == 0.0)


def test_mcc_matrix_zero_probabilities(defaults):
    a = BusinessAssumptions(
        classes=defaults.classes,
        actions=defaults.actions,
        policy=defaults.policy,
        purchase_prob=((0.0,) * 3,) * 3,
        hazard=defaults.hazard,
        incident_cost=defaults.incident_cost,
    )
    assert np.all(mcc_matrix(a).values == 0.0)


def test_mcc_matrix_scaling_doubles_every_cell(defaults):
    doubled = mcc_matrix(defaults.scaled(2.0)).values
    np.testing.assert_allclose(doubled, 2.0 * TABLE2, rtol=1e-9)


def test_mcc_matrix_invalid_lists_every_violation(defaults):
    bad = BusinessAssumptions(
        classes=defaults.classes,
        actions=defaults.actions,
        policy=(0, 1, 0),  # hazard class sold at full price
        purchase_prob=((0.9, 1.2, 0.0), (0.1, 0.9, 0.0), (0.01, 0.05, 0.0)),
        hazard=defaults.hazard,
        incident_cost=defaults.incident_cost,
    )
    with pytest.raises(ValidationError) as err:
        mcc_matrix(bad)
    paths = {v.path for v in err.value.violations}
    assert paths == {"purchase_prob[0][1]", "policy[SP]"}


def test_diagonal_zero_on_random_assumptions():
    rng = np.random.default_rng(101)
    for _ in range(200):
        a = random_valid_assumptions(rng)
        values = mcc_matrix(a).values
        assert np.all(np.diagonal(values) == 0.0)


def test_regret_equivalence_on_random_assumptions():
    # loss - gain must equal the net-cost regret when hazard maps to discard
    rng = np.random.default_rng(202)
    for _ in range(300):
        a = random_valid_assumptions(rng)
        for i in range(a.n_classes):
            base = net_cost(a, i, a.policy[i])
            for j in range(a.n_classes):
                regret = net_cost(a, i, a.policy[j]) - base
                assert mcc_cell(a, i, j) == pytest.approx(regret, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(lam=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False))
def test_homogeneity_under_price_scaling(lam):
    rng = np.random.default_rng(303)
    a = random_valid_assumptions(rng)
    base = mcc_matrix(a).values
    scaled = mcc_matrix(a.scaled(lam)).values
    np.testing.assert_allclose(scaled, lam * base, rtol=1e-9)


def test_homogeneity_at_spec_factors(defaults):
    base = mcc_matrix(defaults).values
    for lam in (0.5, 2.0, 10.0):
        np.testing.assert_allclose(mcc_matrix(defaults.scaled(lam)).values, lam * base, rtol=1e-9)


def test_paper_defaults_off_diagonal_strictly_positive(defaults):
    values = mcc_matrix(defaults).values
    off = values[~np.eye(3, dtype=bool)]
    assert np.all(off > 0)


def test_recommend_action_certain_fresh(defaults):
    rec = recommend_action(defaults, [1, 0, 0])
    assert rec.action_name == "sell-full"
    np.testing.assert_allclose(rec.expected_costs, [-9.0, -5.0, 0.0], atol=1e-9)


def test_recommend_action_certain_spoiled(defaults):
    rec = recommend_action(defaults, [0, 0, 1])
    assert rec.action_name == "discard"
    np.testing.assert_allclose(rec.expected_costs, [99.9, 499.75, 0.0], atol=1e-9)


def test_recommend_action_mixed_belief_matches_brute_force(defaults):
    probs = [0.5, 0.0, 0.5]
    # independent oracle: re-derive each action's expected cost from raw fields
    oracle = []
    for j, action in enumerate(defaults.actions):
        total = 0.0
        for i in range(3):
            p_buy = defaults.purchase_prob[i][j]
            exposure = defaults.incident_cost * p_buy if defaults.hazard[i] else 0.0
            total += probs[i] * (exposure - action.price * p_buy)
        oracle.append(total)
    assert int(np.argmin(oracle)) == 2
    np.testing.assert_allclose(oracle, [45.45, 247.375, 0.0], atol=1e-9)

    rec = recommend_action(defaults, probs)
    assert rec.action_name == "discard"
    np.testing.assert_allclose(rec.expected_costs, oracle, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    lam=st.floats(min_value=1e-3, max_value=1e3, allow_nan=False),
    raw=st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=3, max_size=3).filter(
        lambda v: sum(v) > 1e-6
    ),
)
def test_recommendation_invariant_under_scaling(lam, raw):
    a = paper_defaults()
    probs = np.array(raw) / sum(raw)
    assert recommend_action(a, probs).action_index == \
        recommend_action(a.scaled(lam), probs).action_index


def test_recommend_action_rejects_bad_vectors(defaults):
    with pytest.raises(ValueError):
        recommend_action(defaults, [0.5, 0.5])
    with pytest.raises(ValueError):
        recommend_action(defaults, [0.7, 0.2, 0.2])
    with pytest.raises(ValueError):
        recommend_action(defaults, [-0.2, 0.6, 0.6])


def test_validate_defaults_is_clean(defaults):
    assert validate_assumptions(defaults) == []


def test_validate_reports_probability_out_of_range(defaults):
    bad = BusinessAssumptions(
        classes=defaults.classes,
        actions=defaults.actions,
        policy=defaults.policy,
        purchase_prob=((0.9, 1.2, 0.0), (0.1, 0.9, 0.0), (0.01, 0.05, 0.0)),
        hazard=defaults.hazard,
        incident_cost=defaults.incident_cost,
    )
    violations = validate_assumptions(bad)
    assert len(violations) == 1
    assert violations[0].path == "purchase_prob[0][1]"


def test_validate_reports_hazard_mapped_to_selling(defaults):
    bad = BusinessAssumptions(
        classes=defaults.classes,
        actions=defaults.actions,
        policy=(0, 1, 1),
        purchase_prob=defaults.purchase_prob,
        hazard=defaults.hazard,
        incident_cost=defaults.incident_cost,
    )
    violations = validate_assumptions(bad)
    assert len(violations) == 1
    assert violations[0].path == "policy[SP]"
    assert "discard" in violations[0].message


def test_validate_reports_priced_discard_and_small_k():
    a = BusinessAssumptions(
        classes=(FreshnessClass("only", 0),),
        actions=(ActionSpec("sell", 5.0), ActionSpec("discard", 1.0, is_discard=True)),
        policy=(0,),
        purchase_prob=((0.5, 0.0),),
        hazard=(False,),
        incident_cost=100.0,
    )
    paths = {v.path for v in validate_assumptions(a)}
    assert "classes" in paths
    assert "actions[1].price" in paths


def test_display_rounding_is_half_away_from_zero():
    assert round_money(499.75, 1) == 499.8
    assert round_money(-0.25, 1) == -0.3
    assert format_money(499.75, 1) == "499.8"
    assert format_money(4997.5, 0) == "4,998"
    assert format_money(0.0, 1) == "0.0"


def test_table2_display_strings(defaults):
    shown = {format_money(v, 1) for v in mcc_matrix(defaults).values.ravel()}
    assert shown == {"0.0", "4.0", "9.0", "3.5", "4.5", "99.9", "499.8"}
