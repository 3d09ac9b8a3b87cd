import json
from fractions import Fraction
from pathlib import Path

import pytest

from hypmirror.config import (
    InputConfig,
    JobConfig,
    Task,
    config_schema,
    construct_model,
    load_config,
    parse_config,
    save_config,
)
from hypmirror.exceptions import ConfigError, InputError, NonExactLiteral

from .conftest import CONFIGS


def _job(**overrides) -> str:
    job = {"input": dict(CONFIGS["tp2"]), "tasks": ["check"]}
    job.update(overrides)
    return json.dumps(job)


def test_load_config(config_file: Path):
    config = load_config(config_file)
    assert config.tasks == [Task.mirror, Task.periods]
    assert config.input.u == [[1, 0], [0, 1], [-1, -1]]
    assert config.input.lambda_r == [0, 0, 1]
    assert config.input.constants == [0, 0, 5]
    assert config.input.kahler.mode == "formal"
    assert config.input.kahler.numeric is None
    (point,) = config.options.points
    assert point["Z2"] == "q3"
    assert isinstance(point["Z2"], str)
    assert point["Z1"] == Fraction(-1)
    assert config.output.format == "json"
    assert config.render.width == 400


def test_save_config(tmp_path: Path, config_file: Path):
    config = load_config(config_file)
    path = tmp_path / "saved.json"
    save_config(path, config)
    assert load_config(path) == config
    with pytest.raises(FileExistsError):
        save_config(path, config)
    save_config(path, config, overwrite=True)


def test_rational_forms():
    config = parse_config(
        _job(input={"u": [[1], [-1]], "lambdaR": ["1/2", [3, 4]], "constants": ["0.25", 1]})
    )
    assert config.input.lambda_r == [Fraction(1, 2), Fraction(3, 4)]
    assert config.input.constants == [Fraction(1, 4), Fraction(1)]


def test_missing_field_pointer():
    with pytest.raises(ConfigError) as exc_info:
        parse_config(json.dumps({"input": {"lambdaR": [0, 1]}}))
    assert exc_info.value.pointer == "/input/u"
    assert isinstance(exc_info.value, InputError)


def test_float_literal(caplog: pytest.LogCaptureFixture):
    with pytest.raises(NonExactLiteral) as exc_info:
        parse_config(_job(input={"u": [[1], [-1]], "lambdaR": [0, 0.5]}))
    assert exc_info.value.pointer == "/input/lambdaR/1"
    assert "/input/lambdaR/1" in caplog.text


def test_invalid_json():
    with pytest.raises(ConfigError) as exc_info:
        parse_config("{not json")
    assert exc_info.value.pointer == ""


@pytest.mark.parametrize(
    "input_overrides",
    [
        {"u": []},
        {"u": [[1, 0], [0]]},
        {"d": 3},
        {"n": 2},
        {"constants": [0, 0]},
        {"kahler": {"mode": "numeric", "values": {"q3": 2}}},
        {"kahler": {"mode": "sometimes"}},
    ],
)
def test_invalid_input(input_overrides: dict):
    raw = dict(CONFIGS["tp2"])
    raw.update(input_overrides)
    with pytest.raises(ConfigError):
        parse_config(_job(input=raw))


def test_numeric_kahler():
    raw = dict(CONFIGS["tp2"], kahler={"mode": "numeric", "values": {"q3": "1/3"}})
    config = parse_config(_job(input=raw))
    assert config.input.kahler.numeric == {"q3": Fraction(1, 3)}


@pytest.mark.parametrize(
    "options",
    [
        {"gauge": "sideways"},
        {"phiSigns": {"1": 2}},
    ],
)
def test_invalid_options(options: dict):
    with pytest.raises(ConfigError):
        parse_config(_job(options=options))


def test_options():
    config = parse_config(
        _job(
            options={
                "gauge": "formal",
                "phiSigns": {"1": -1},
                "atlasMutation": {"edge": [[0, 0, 0], [1, 0, 0]], "direction": 1},
                "monomials": [{"z": [1, 0, 0], "w": [0, 0, 1]}],
                "chamber": "++-",
            }
        )
    )
    assert config.options.gauge == "formal"
    assert config.options.phi_signs == {1: -1}
    assert config.options.atlas_mutation.edge == ([0, 0, 0], [1, 0, 0])
    assert config.options.monomials[0].w == [0, 0, 1]
    assert config.options.chamber == "++-"


def test_unknown_task():
    with pytest.raises(ConfigError) as exc_info:
        parse_config(_job(tasks=["levitate"]))
    assert exc_info.value.pointer == "/tasks/0"


def test_construct_model():
    model = construct_model(InputConfig, {"u": [[1]], "lambda_r": [0]})
    assert model.lambda_r == [0]
    with pytest.raises(ConfigError):
        construct_model(InputConfig, {"u": [[1]]})


def test_config_schema():
    schema = config_schema()
    assert schema["title"] == JobConfig.__name__
    assert "input" in schema["required"]
