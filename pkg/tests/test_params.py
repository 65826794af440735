from __future__ import annotations

import json

import pytest

from membuoy import ThingType
from membuoy.errors import BadParam, MalformedDocument
from membuoy.params import DEFAULT_PARAMS, ParameterSet
from membuoy.records import decay_factor
from membuoy.timeutil import DAY

from conftest import REPO_ROOT


def test_defaults_are_valid_and_cover_all_types():
    DEFAULT_PARAMS.validate()
    assert set(DEFAULT_PARAMS.rows) == set(ThingType)


def test_email_sinks_faster_than_person_everywhere():
    email = DEFAULT_PARAMS.row(ThingType.EMAIL)
    person = DEFAULT_PARAMS.row(ThingType.PERSON)
    for days in (0.1, 1, 7, 30, 365):
        assert decay_factor(email, DEFAULT_PARAMS, days * DAY, 0) < decay_factor(
            person, DEFAULT_PARAMS, days * DAY, 0
        )


def test_config_round_trip():
    restored = ParameterSet.from_obj(DEFAULT_PARAMS.to_obj())
    assert restored == DEFAULT_PARAMS


def test_partial_override_merges_over_defaults():
    params = ParameterSet.from_obj({"gain": 0.4, "type_rows": {"email": {"tau_days": 1.0}}})
    assert params.gain == 0.4
    assert params.row(ThingType.EMAIL).tau_days == 1.0
    assert params.row(ThingType.EMAIL).alpha == DEFAULT_PARAMS.row(ThingType.EMAIL).alpha
    assert params.row(ThingType.PERSON) == DEFAULT_PARAMS.row(ThingType.PERSON)


def test_unknown_keys_rejected():
    with pytest.raises(BadParam):
        ParameterSet.from_obj({"gian": 0.4})
    with pytest.raises(BadParam):
        ParameterSet.from_obj({"event_weights": {"poke": 0.5}})
    with pytest.raises(BadParam):
        ParameterSet.from_obj({"type_rows": {"emails": {"tau_days": 1.0}}})


@pytest.mark.parametrize(
    "override",
    [
        {"gain": 0.0},
        {"gain": 1.5},
        {"event_weights": {"view": 1.2}},
        {"spread_rho": 1.0},
        {"spread_depth": 0},
        {"spread_epsilon": 0.0},
        {"type_rows": {"generic": {"tau_days": -1.0}}},
        # person forgotten faster than email violates the type heuristic
        {"type_rows": {"person": {"tau_days": 1.0, "alpha": 2.0}}},
    ],
)
def test_constraint_violations_rejected(override):
    with pytest.raises(BadParam):
        ParameterSet.from_obj(override)


def test_invalid_json_rejected():
    with pytest.raises(MalformedDocument):
        ParameterSet.from_json("{nope")


def test_bundled_config_matches_defaults():
    text = (REPO_ROOT / "configs" / "default_params.json").read_text()
    assert ParameterSet.from_json(text) == DEFAULT_PARAMS
    assert json.loads(text) == DEFAULT_PARAMS.to_obj()
