from pathlib import Path

import pytest

from microel.scenario import load_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def scenario_text(name):
    return (SCENARIO_DIR / f"{name}.cfg").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def equal_rate_scenario():
    return load_scenario(scenario_text("equal_rate"))


@pytest.fixture(scope="session")
def sine_scenario():
    return load_scenario(scenario_text("sine_acquisition"))


@pytest.fixture(scope="session")
def piecewise_noise_scenario():
    return load_scenario(scenario_text("piecewise_noise"))
