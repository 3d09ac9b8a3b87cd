import json
from pathlib import Path
from typing import Any, Dict

import pytest

from hypmirror import reports
from hypmirror.config import JobConfig, Task, construct_model, load_config
from hypmirror.exceptions import NotSpanning
from hypmirror.reports import ErrorInfo, render_text, run, write_reports

from .conftest import CONFIGS


def _job(name: str, tasks: list, **options: Any) -> JobConfig:
    return JobConfig.parse_obj({"input": CONFIGS[name], "tasks": tasks, "options": options})


@pytest.fixture(scope="module")
def not_spanning() -> Dict[str, Any]:
    return {"u": [[1, 1], [1, -1]], "lambdaR": [0, 0]}


def test_run_mirror_job(config_file: Path):
    bundle = run(load_config(config_file))
    assert bundle.exit_code == 0
    mirror = bundle.report("mirror")
    assert mirror.status == "pass"
    assert mirror.result["equations"] == [
        "u1*v1 = (1+Z1)*(1+q3*Z1^-1*Z2^-1)",
        "u2*v2 = (1+Z2)*(1+q3*Z1^-1*Z2^-1)",
    ]
    assert mirror.result["generating_functions"]["C[0,0,0]"]["1"]["u"] == "U1"
    (point,) = mirror.result["points"]
    assert point["verdict"] == "SINGULAR_POINT"
    assert point["rank"] == 1
    assert point["point"]["Z2"] == "q3"
    periods = bundle.report(Task.periods)
    loci = periods.result["support"]["loci"]
    assert loci[-1]["equation"] == "q3*Z1^-1*Z2^-1 = -1"


def test_run_task_override(config_file: Path):
    bundle = run(load_config(config_file), [Task.check])
    assert [r.task for r in bundle.reports] == [Task.check]
    result = bundle.report("check").result
    assert result["normalized"] is True
    assert result["unimodular"]["holds"] is True
    assert result["smoothness"]["verdict"] == "SMOOTH"


def test_check_reports_unnormalized_input(not_spanning: Dict[str, Any]):
    bundle = run(JobConfig.parse_obj({"input": not_spanning, "tasks": ["check", "circuits"]}))
    check = bundle.report("check")
    assert check.status == "pass"
    assert check.exit_code == 0
    assert check.result["normalized"] is False
    assert "smoothness" not in check.result
    circuits = bundle.report("circuits")
    assert circuits.status == "error"
    assert circuits.exit_code == 2
    assert circuits.error.type == "NotSpanning"
    assert circuits.error.details["invariant"] == 2
    assert bundle.exit_code == 2


def test_circuits_task():
    result = run(_job("four_line", ["circuits"])).report("circuits").result
    assert result["input"]["kahler"] == ["q3", "q4"]
    assert [c["parameter_string"] for c in result["circuits"]] == ["q4", "q3", "q3*q4^-1"]


def test_chambers_task():
    result = run(_job("tp2", ["chambers"], chamber="++-")).report("chambers").result
    assert len(result["real"]) == 7
    assert len(result["tropical"]) == 8
    assert result["tropical"][0]["key"] == "C[0,0,0]"
    assert [c["subset"] for c in result["complement"]] == [[3], [1, 3], [2, 3]]


def test_chambers_task_empty_chamber():
    report = run(_job("tp2", ["chambers"], chamber="+++")).report("chambers")
    assert report.status == "error"
    assert report.error.type == "EmptyChamber"


def test_strata_task():
    result = run(_job("tp2", ["strata"])).report("strata").result
    assert len(result["strata"]) == 15
    assert all(s["admissible"] and "frame" in s for s in result["strata"])
    assert len(result["adjacency"]) == 11
    apex = next(s for s in result["strata"] if s["key"] == "S[1:1|2:2|3:0,1,2]")
    assert apex["dimension"] == 0
    assert apex["chambers"] == ["C[1,2,0]", "C[1,2,1]", "C[1,2,2]"]


def test_atlas_task():
    result = run(_job("tp1", ["atlas"])).report("atlas").result
    assert len(result["charts"]) == 5
    first = result["transitions"][0]
    assert (first["source"], first["target"]) == ("C[0,0]", "C[1,0]")
    assert first["map"]["V1"] == "V1+V1*Z1"
    assert "Z1" not in first["map"]
    assert len(result["embeddings"]) == 4


def test_verify_task():
    report = run(_job("tp2", ["verify"])).report("verify")
    assert report.status == "pass"
    assert report.result["passed"] is True
    assert [c["name"] for c in report.result["checks"]] == [
        "inverse",
        "cocycle",
        "stratum_compatibility",
        "global_functions",
        "affinization",
    ]


def test_verify_task_mutation(caplog: pytest.LogCaptureFixture):
    job = _job("tp1", ["verify"], atlasMutation={"edge": [[0, 0], [1, 0]], "direction": 1})
    bundle = run(job)
    report = bundle.report("verify")
    assert report.status == "fail"
    assert report.exit_code == 1
    assert bundle.exit_code == 1
    failed = [c["name"] for c in report.result["checks"] if not c["passed"]]
    assert "global_functions" in failed
    assert "Verification task verify failed" in caplog.text


def test_multiplicative_task():
    job = _job("tp1", ["multiplicative"], monomials=[{"z": [1, 0], "w": [0, 1]}])
    report = run(job).report("multiplicative")
    assert report.status == "pass"
    assert report.result["decompositions"][0]["decomposition"] == "zz1"
    assert report.result["pi"]["totally_unimodular"] is True


def test_multiplicative_task_wrong_sign():
    report = run(_job("tp2", ["multiplicative"], phiSigns={"1": -1})).report("multiplicative")
    assert report.status == "fail"
    assert report.exit_code == 1


def test_multiplicative_task_not_invariant():
    job = _job("tp1", ["multiplicative"], monomials=[{"z": [1, 0], "w": [0, 0]}])
    report = run(job).report("multiplicative")
    assert report.status == "error"
    assert report.exit_code == 1
    assert report.error.details == {"obstruction": [1, 1], "pairing": 1}


def test_numeric_kahler_job():
    raw = dict(CONFIGS["tp2"], kahler={"mode": "numeric", "values": {"q3": "1/2"}})
    bundle = run(JobConfig.parse_obj({"input": raw, "tasks": ["mirror", "verify"]}))
    assert bundle.exit_code == 0
    equations = bundle.report("mirror").result["equations"]
    assert equations[0] == "u1*v1 = (1+Z1)*(1+1/2*Z1^-1*Z2^-1)"


def test_render_text(config_file: Path):
    text = render_text(run(load_config(config_file)))
    assert "[mirror] pass" in text
    assert "  u1*v1 = (1+Z1)*(1+q3*Z1^-1*Z2^-1)" in text
    assert "point 1: SINGULAR_POINT (rank 1)" in text
    assert "[periods] pass" in text
    assert text.endswith("exit code: 0\n")


def test_write_reports(tmp_path: Path, config_file: Path):
    bundle = run(load_config(config_file))
    written = write_reports(bundle, tmp_path / "out")
    assert [p.name for p in written] == ["mirror.json", "periods.json"]
    data = json.loads(written[0].read_text())
    assert data["task"] == "mirror"
    assert data["status"] == "pass"
    (text_file,) = write_reports(bundle, tmp_path / "out", "text")
    assert text_file.name == "report.txt"
    assert text_file.read_text() == render_text(bundle)


def test_bundle_to_json(config_file: Path):
    data = json.loads(run(load_config(config_file)).to_json())
    assert [r["task"] for r in data["reports"]] == ["mirror", "periods"]


def test_error_info():
    info = ErrorInfo.from_exception(NotSpanning(3))
    assert info.type == "NotSpanning"
    assert info.details == {"invariant": 3}
    assert "Smith invariant 3" in info.message
    err = RuntimeError("boom")
    err.payload = {1, 2}  # type: ignore[attr-defined]
    assert ErrorInfo.from_exception(err).details == {"payload": "{1, 2}"}


def test_bad_monomial_keeps_other_reports():
    job = construct_model(
        JobConfig,
        {
            "input": CONFIGS["tp2"],
            "tasks": ["check", "multiplicative", "periods"],
            "options": {"monomials": [{"z": [1], "w": [0, 0, 0]}]},
        },
    )
    bundle = run(job)
    assert [r.task for r in bundle.reports] == [Task.check, Task.multiplicative, Task.periods]
    assert bundle.report("check").status == "pass"
    assert bundle.report("periods").status == "pass"
    report = bundle.report("multiplicative")
    assert report.status == "error"
    assert report.exit_code == 2
    assert report.error.type == "ConfigError"
    assert report.error.details["pointer"] == "/options/monomials/0/z"
    assert bundle.exit_code == 2


@pytest.mark.parametrize(
    "mutation, pointer",
    [
        ({"edge": [[0, 0], [1, 0]], "direction": 2}, "/options/atlasMutation/direction"),
        ({"edge": [[0, 0], [1, 1]], "direction": 1}, "/options/atlasMutation/edge"),
    ],
)
def test_bad_atlas_mutation(mutation: Dict[str, Any], pointer: str):
    report = run(_job("tp1", ["verify"], atlasMutation=mutation)).report("verify")
    assert report.status == "error"
    assert report.exit_code == 2
    assert report.error.details["pointer"] == pointer


def test_unexpected_error_is_reported(
    monkeypatch: pytest.MonkeyPatch, caplog: pytest.LogCaptureFixture
):
    def crash(ctx):
        raise RuntimeError("boom")

    monkeypatch.setitem(reports._TASKS, Task.periods, crash)
    bundle = run(_job("tp2", ["periods", "check"]))
    report = bundle.report("periods")
    assert report.status == "error"
    assert report.exit_code == 1
    assert report.error.type == "RuntimeError"
    assert report.error.message == "boom"
    assert bundle.report("check").status == "pass"
    assert bundle.exit_code == 1
    assert "Task crashed" in caplog.text
