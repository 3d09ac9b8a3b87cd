import json
import os
from pathlib import Path
from typing import Any, Dict

import pytest
from _pytest.logging import LogCaptureFixture
from hypothesis import Verbosity, settings
from loguru import logger

from hypmirror.arrangement import load_and_normalize
from hypmirror.models.arrangement import HypertoricData
from hypmirror.models.tropical import TropicalArrangement
from hypmirror.tropical import build_tropical

from .strategies import init_strategies

# Init custom hypothesis strategies
init_strategies()

# Hypothesis profiles
settings.register_profile("ci", settings(max_examples=1000, deadline=None))
settings.register_profile(
    "debug",
    settings(
        max_examples=10,
        verbosity=Verbosity.verbose,
        deadline=None,
    ),
)
settings.register_profile("dev", max_examples=10, deadline=None)
settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


# Raw inputs of the configurations used throughout the test suite
CONFIGS: Dict[str, Dict[str, Any]] = {
    "tp1": {"u": [[1], [-1]], "lambdaR": [0, 1], "constants": [0, 2]},
    "tp2": {
        "u": [[1, 0], [0, 1], [-1, -1]],
        "lambdaR": [0, 0, 1],
        "constants": [0, 0, 5],
    },
    "tp3": {
        "u": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
        "lambdaR": [0, 0, 0, 1],
        "constants": [0, 0, 0, 5],
    },
    "a2": {"u": [[1], [1], [1]], "lambdaR": [0, 1, 2], "constants": [0, 1, 2]},
    "a3": {"u": [[1], [1], [1], [1]], "lambdaR": [0, 1, 2, 3], "constants": [0, 1, 2, 3]},
    "a4": {
        "u": [[1], [1], [1], [1], [1]],
        "lambdaR": [0, 1, 2, 3, 4],
        "constants": [0, 1, 2, 3, 4],
    },
    "four_line": {
        "u": [[1, 0], [0, 1], [-1, -1], [0, -1]],
        "lambdaR": [0, 0, 3, 1],
        "constants": [0, 0, 5, 2],
    },
}


def load_named(name: str) -> HypertoricData:
    raw = CONFIGS[name]
    return load_and_normalize(raw["u"], raw["lambdaR"], raw["constants"])


@pytest.fixture
def caplog(caplog: LogCaptureFixture):
    # https://loguru.readthedocs.io/en/stable/resources/migration.html#making-things-work-with-pytest-and-caplog
    logger.enable("hypmirror")
    handler_id = logger.add(caplog.handler, format="{message}")
    yield caplog
    logger.remove(handler_id)
    logger.disable("hypmirror")


@pytest.fixture(scope="session")
def tp1() -> HypertoricData:
    return load_named("tp1")


@pytest.fixture(scope="session")
def tp2() -> HypertoricData:
    return load_named("tp2")


@pytest.fixture(scope="session")
def tp3() -> HypertoricData:
    return load_named("tp3")


@pytest.fixture(scope="session")
def a3() -> HypertoricData:
    return load_named("a3")


@pytest.fixture(scope="session")
def four_line() -> HypertoricData:
    return load_named("four_line")


@pytest.fixture(scope="session")
def tp2_tropical(tp2: HypertoricData) -> TropicalArrangement:
    return build_tropical(tp2)


@pytest.fixture(scope="function")
def config_file(tmp_path: Path) -> Path:
    """Write a job config for T*P^2 running the mirror task."""
    config_file = tmp_path / "job.json"
    config_file.write_text(
        json.dumps(
            {
                "input": CONFIGS["tp2"],
                "tasks": ["mirror", "periods"],
                "options": {
                    "points": [{"Z1": -1, "Z2": "q3", "u1": 0, "v1": 0, "u2": 1, "v2": 0}]
                },
            },
            indent=4,
        )
    )
    return config_file
