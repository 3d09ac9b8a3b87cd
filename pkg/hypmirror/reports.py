"""Task orchestration and report rendering.

`run` executes the tasks of a `JobConfig` in order and collects one
`TaskReport` per task. A task that raises never stops the run; its report
carries the error and the exit code it maps to.
"""
import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from loguru import logger
from pydantic import BaseModel, Field

from .arrangement import (
    check_simple_real,
    check_smooth,
    check_unimodular,
    circuits,
    cotangent_complement,
    load_and_normalize,
    real_chambers,
    real_hyperplanes,
)
from .atlas import (
    Atlas,
    build_atlas,
    chamber_key,
    symplectic_residual,
    verify_atlas,
    verify_volume_form,
)
from .config import JobConfig, Task
from .exceptions import (
    ConfigError,
    HypmirrorException,
    InvalidArgument,
    NotAdjacent,
    exit_code_for,
)
from .mirror import (
    generating_functions,
    mirror_equations,
    period_support,
    singular_point_check,
)
from .models.arrangement import HypertoricData
from .models.tropical import TropicalArrangement
from .multiplicative import decompose_invariant, invariant_generators, pi_matrix, verify_phi
from .symbolic import RationalFn
from .tropical import (
    adjacent_chambers,
    admissible,
    build_tropical,
    chamber_adjacency,
    enumerate_chambers,
    enumerate_strata,
    stratum_frame,
)
from .utils import jsonable

PASS = "pass"
FAIL = "fail"
ERROR = "error"


class ErrorInfo(BaseModel):
    type: str
    message: str
    details: Dict[str, Any] = Field(
        default_factory=dict, description="Structured payload of the exception."
    )

    @classmethod
    def from_exception(cls, exc: BaseException) -> "ErrorInfo":
        details = {}
        for k, v in sorted(getattr(exc, "__dict__", {}).items()):
            if k.startswith("_"):
                continue
            try:
                details[k] = jsonable(v)
            except TypeError:
                details[k] = repr(v)
        return cls(type=type(exc).__name__, message=str(exc), details=details)


class TaskReport(BaseModel):
    task: Task
    status: str = Field(..., description="`pass`, `fail` or `error`.")
    exit_code: int
    error: Optional[ErrorInfo] = None
    result: Dict[str, Any] = Field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(jsonable(self), indent=2, ensure_ascii=False)


class ReportBundle(BaseModel):
    reports: List[TaskReport] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return max((r.exit_code for r in self.reports), default=0)

    def report(self, task: Union[Task, str]) -> TaskReport:
        return next(r for r in self.reports if r.task == Task(task))

    def to_json(self) -> str:
        return json.dumps(jsonable(self), indent=2, ensure_ascii=False)


class _Context:
    """Lazily built objects shared between the tasks of one run."""

    def __init__(self, job: JobConfig) -> None:
        self.job = job
        self._data: Optional[HypertoricData] = None
        self._arrangement: Optional[TropicalArrangement] = None
        self._atlas: Optional[Atlas] = None

    @property
    def values(self) -> Optional[Dict]:
        return self.job.input.kahler.numeric

    def load(self, strict: bool = True) -> HypertoricData:
        inp = self.job.input
        return load_and_normalize(
            inp.u, inp.lambda_r, inp.constants, inp.lambda_c, strict=strict
        )

    @property
    def data(self) -> HypertoricData:
        if self._data is None:
            self._data = self.load()
        return self._data

    @property
    def arrangement(self) -> TropicalArrangement:
        if self._arrangement is None:
            self._arrangement = build_tropical(self.data)
        return self._arrangement

    @property
    def atlas(self) -> Atlas:
        if self._atlas is None:
            self._atlas = build_atlas(
                self.data, self.arrangement, self.job.options.gauge, self.values
            )
        return self._atlas


def _input_summary(h: HypertoricData) -> Dict[str, Any]:
    return {
        "d": h.d,
        "n": h.n,
        "order": h.order,
        "u": h.u,
        "lambdaR": h.lambda_r,
        "constants": h.trop_const,
        "kahler": h.kahler,
    }


def _check(ctx: _Context) -> Dict[str, Any]:
    raw = ctx.load(strict=False)
    result: Dict[str, Any] = {
        "normalized": raw.normalized,
        "unimodular": check_unimodular(raw),
        "simple": check_simple_real(raw),
    }
    if raw.normalized:
        result["smoothness"] = check_smooth(raw)
    return result


def _circuits(ctx: _Context) -> Dict[str, Any]:
    found = circuits(ctx.data)
    return {
        "input": _input_summary(ctx.data),
        "circuits": [
            {**c.dict(), "parameter_string": c.parameter_string} for c in found
        ],
    }


def _chambers(ctx: _Context) -> Dict[str, Any]:
    h = ctx.data
    result: Dict[str, Any] = {
        "hyperplanes": real_hyperplanes(h),
        "real": real_chambers(h),
        "tropical": [
            {"key": c.key, "label": c.label, "witness": c.witness}
            for c in enumerate_chambers(ctx.arrangement)
        ],
    }
    if ctx.job.options.chamber is not None:
        result["complement"] = cotangent_complement(h, ctx.job.options.chamber)
    return result


def _strata(ctx: _Context) -> Dict[str, Any]:
    arr = ctx.arrangement
    strata = []
    for stratum in enumerate_strata(arr):
        entry: Dict[str, Any] = {
            "key": stratum.key,
            "ties": stratum.ties,
            "dimension": stratum.dimension,
            "witness": stratum.cells[0].witness,
            "admissible": admissible(stratum, ctx.data),
            "chambers": [chamber_key(c) for c in adjacent_chambers(arr, stratum)],
        }
        if entry["admissible"]:
            entry["frame"] = stratum_frame(stratum, arr)
        strata.append(entry)
    return {
        "strata": strata,
        "adjacency": [
            {
                "source": chamber_key(e.source),
                "target": chamber_key(e.target),
                "hyperplane": e.hyperplane,
            }
            for e in chamber_adjacency(arr)
        ],
    }


def _mirror(ctx: _Context) -> Dict[str, Any]:
    h = ctx.data
    equations = mirror_equations(h, ctx.values)
    generating = {}
    for c in enumerate_chambers(ctx.arrangement):
        per_direction = {}
        for j in range(1, h.d + 1):
            u, v = generating_functions(h, c.label, j, values=ctx.values)
            per_direction[f"{j}"] = {"u": u.to_string(), "v": v.to_string()}
        generating[c.key] = per_direction
    points = [
        {"point": point, **singular_point_check(h, point, ctx.values).dict()}
        for point in ctx.job.options.points
    ]
    return {
        "equations": [e.to_string() for e in equations],
        "structured": equations,
        "generating_functions": generating,
        "points": points,
    }


def _binding_strings(binding: Dict[str, RationalFn]) -> Dict[str, str]:
    return {name: f.to_string() for name, f in binding.items() if f.to_string() != name}


def _atlas(ctx: _Context) -> Dict[str, Any]:
    atlas = ctx.atlas
    transitions = [
        {
            "source": chamber_key(a),
            "target": chamber_key(b),
            "map": _binding_strings(atlas.transition_map(a, b)),
        }
        for a, b in sorted(atlas.transitions)
    ]
    embeddings = [
        {
            "chamber": chamber_key(label),
            "stratum": f"S[{sid}]",
            "map": _binding_strings(atlas.embedding_map(label, sid)),
        }
        for label, sid in sorted(atlas.embeddings)
    ]
    return {"charts": atlas.charts, "transitions": transitions, "embeddings": embeddings}


def _verify(ctx: _Context) -> Dict[str, Any]:
    atlas = ctx.atlas
    mutation = ctx.job.options.atlas_mutation
    if mutation is not None:
        edge = (tuple(mutation.edge[0]), tuple(mutation.edge[1]))
        try:
            atlas = atlas.with_flipped_delta(edge, mutation.direction)
        except (InvalidArgument, NotAdjacent) as e:
            field = "direction" if isinstance(e, InvalidArgument) else "edge"
            raise ConfigError(str(e), f"/options/atlasMutation/{field}") from e
    report = verify_atlas(atlas)
    volume = verify_volume_form(atlas)
    return {
        "passed": report.passed and all(v.sign is not None for v in volume),
        "checks": report.checks,
        "volume_form": volume,
        "symplectic_residual": symplectic_residual(atlas),
    }


def _multiplicative(ctx: _Context) -> Dict[str, Any]:
    h = ctx.data
    pi = pi_matrix(h)
    report = verify_phi(h, ctx.job.options.phi_signs, ctx.values)
    decompositions = []
    for i, m in enumerate(ctx.job.options.monomials):
        try:
            dec = decompose_invariant(h, m.z, m.w)
        except InvalidArgument as e:
            field = "z" if e.argument == "a" else "w"
            raise ConfigError(str(e), f"/options/monomials/{i}/{field}") from e
        decompositions.append({"z": m.z, "w": m.w, "decomposition": dec.to_string()})
    return {
        "passed": report.passed,
        "pi": pi,
        "generators": invariant_generators(pi),
        "phi": report,
        "decompositions": decompositions,
    }


def _periods(ctx: _Context) -> Dict[str, Any]:
    return {"support": period_support(ctx.data)}


_TASKS: Dict[Task, Callable[[_Context], Dict[str, Any]]] = {
    Task.check: _check,
    Task.circuits: _circuits,
    Task.chambers: _chambers,
    Task.strata: _strata,
    Task.mirror: _mirror,
    Task.atlas: _atlas,
    Task.verify: _verify,
    Task.multiplicative: _multiplicative,
    Task.periods: _periods,
}


def _run_task(task: Task, ctx: _Context) -> TaskReport:
    logger.debug("Running task {}", task.value)
    try:
        result = _TASKS[task](ctx)
    except HypmirrorException as e:
        code = exit_code_for(e)
        logger.bind(task=task.value).error("Task failed with {}: {}", type(e).__name__, e)
        return TaskReport(
            task=task, status=ERROR, exit_code=code, error=ErrorInfo.from_exception(e)
        )
    except Exception as e:
        logger.bind(task=task.value).exception("Task crashed")
        return TaskReport(
            task=task, status=ERROR, exit_code=exit_code_for(e), error=ErrorInfo.from_exception(e)
        )
    passed = result.get("passed", True)
    if not passed:
        logger.warning("Verification task {} failed", task.value)
    return TaskReport(
        task=task,
        status=PASS if passed else FAIL,
        exit_code=0 if passed else 1,
        result=jsonable(result),
    )


def run(job: JobConfig, tasks: Optional[List[Task]] = None) -> ReportBundle:
    """Run the given tasks (default: the config's task list) and collect the reports."""
    ctx = _Context(job)
    bundle = ReportBundle()
    for task in tasks if tasks is not None else job.tasks:
        bundle.reports.append(_run_task(Task(task), ctx))
    logger.info("Ran {} tasks, exit code {}", len(bundle.reports), bundle.exit_code)
    return bundle


def _text_lines(report: TaskReport) -> List[str]:
    r = report.result
    if report.error is not None:
        return [f"  {report.error.type}: {report.error.message}"]
    task = report.task
    if task is Task.check:
        lines = [f"  unimodular: {r['unimodular']['holds']}", f"  simple: {r['simple']['holds']}"]
        if "smoothness" in r:
            lines.append(f"  smoothness: {r['smoothness']['verdict']}")
        return lines
    if task is Task.circuits:
        return [
            f"  {c['support']}  +{c['plus']} -{c['minus']}  q^beta = {c['parameter_string']}"
            for c in r["circuits"]
        ]
    if task is Task.chambers:
        return [
            f"  real chambers: {len(r['real'])}",
            f"  tropical chambers: {len(r['tropical'])}",
        ] + [f"    {c['key']}" for c in r["tropical"]]
    if task is Task.strata:
        return [
            f"  {s['key']} dim {s['dimension']}" + ("" if s["admissible"] else " (not admissible)")
            for s in r["strata"]
        ]
    if task is Task.mirror:
        return [f"  {e}" for e in r["equations"]] + [
            f"  point {i}: {p['verdict']} (rank {p['rank']})"
            for i, p in enumerate(r["points"], start=1)
        ]
    if task is Task.atlas:
        return [
            f"  charts: {len(r['charts'])}",
            f"  transitions: {len(r['transitions'])}",
            f"  embeddings: {len(r['embeddings'])}",
        ]
    if task is Task.verify:
        lines = [
            f"  {c['name']}: {'ok' if c['passed'] else 'FAILED'} ({c['checked']} cases)"
            for c in r["checks"]
        ]
        signs = [v["sign"] for v in r["volume_form"]]
        lines.append(f"  volume form: {'ok' if None not in signs else 'FAILED'}")
        return lines
    if task is Task.multiplicative:
        return [
            f"  phi(u{p['index']} v{p['index']}) residual: {p['residual']}"
            for p in r["phi"]["residuals"]
        ] + [f"  {m['decomposition']}" for m in r["decompositions"]]
    return [f"  {locus['equation']}" for locus in r["support"]["loci"]]


def render_text(bundle: ReportBundle) -> str:
    """A human readable summary of every task report."""
    lines = []
    for report in bundle.reports:
        lines.append(f"[{report.task.value}] {report.status}")
        lines.extend(_text_lines(report))
    lines.append(f"exit code: {bundle.exit_code}")
    return "\n".join(lines) + "\n"


def write_reports(
    bundle: ReportBundle, directory: Union[str, Path], fmt: str = "json"
) -> List[Path]:
    """Write one `<task>.json` file per report, or a single `report.txt`."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "text":
        path = out / "report.txt"
        path.write_text(render_text(bundle), encoding="utf-8")
        written.append(path)
    else:
        for report in bundle.reports:
            path = out / f"{report.task.value}.json"
            path.write_text(report.to_json() + "\n", encoding="utf-8")
            written.append(path)
    logger.debug("Wrote {}", [str(p) for p in written])
    return written
