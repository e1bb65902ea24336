from __future__ import annotations

from pathlib import Path

import pytest

from dpmsim.scenario import Scenario, parse_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(scope="session")
def case_study() -> Scenario:
    return parse_scenario((SCENARIO_DIR / "case_study.scenario").read_text())


@pytest.fixture(scope="session")
def case_study_sw() -> Scenario:
    return parse_scenario((SCENARIO_DIR / "case_study_software.scenario").read_text())
