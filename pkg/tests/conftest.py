from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from membuoy import Engine, Scenario, parse_scenario

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIOS_DIR = REPO_ROOT / "scenarios"
TEMPLATE_NAMES = [
    "solo-task",
    "group-task",
    "group-task-readers",
    "before-after-event",
    "rome-trip",
]


@pytest.fixture(scope="session")
def scenarios_dir() -> Path:
    return SCENARIOS_DIR


@pytest.fixture(scope="session")
def bundled_scenarios() -> dict[str, Scenario]:
    return {
        name: parse_scenario((SCENARIOS_DIR / f"{name}.json").read_text())
        for name in TEMPLATE_NAMES
    }


@pytest.fixture()
def solo_engine(bundled_scenarios) -> tuple[Engine, Scenario]:
    scenario = parse_scenario(bundled_scenarios["solo-task"].to_json())
    engine = Engine(scenario.graph)
    engine.run_scenario(scenario)
    return engine, scenario
