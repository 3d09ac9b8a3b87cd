"""Command line entry point: `hypmirror <task> --config <file>`."""
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from loguru import logger

from .arrangement import load_and_normalize
from .config import JobConfig, Task, load_config
from .exceptions import HypmirrorException, exit_code_for
from .reports import render_text, run, write_reports
from .svg import emit_svg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypmirror",
        description="Compute and verify SYZ mirrors of hypertoric varieties.",
    )
    parser.add_argument(
        "task",
        choices=["run"] + [t.value for t in Task],
        help="Task to run; `run` executes the task list of the config.",
    )
    parser.add_argument("--config", type=Path, required=True, help="Path to the JSON job config.")
    parser.add_argument("--out", type=Path, default=None, help="Directory for report files.")
    parser.add_argument(
        "--format", choices=["json", "text"], default=None, help="Report format (default: json)."
    )
    parser.add_argument(
        "--svg", action="store_true", help="Write real.svg and tropical.svg (d <= 2 only)."
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log to stderr.")
    return parser


def _enable_logging(verbose: bool) -> None:
    if not verbose:
        return
    logger.remove()
    logger.add(sys.stderr, level="DEBUG")
    logger.enable("hypmirror")


def _write_svg(job: JobConfig, directory: Path) -> List[Path]:
    inp = job.input
    h = load_and_normalize(inp.u, inp.lambda_r, inp.constants, inp.lambda_c)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for kind in ("real", "tropical"):
        path = directory / f"{kind}.svg"
        path.write_text(emit_svg(h, kind, job.render), encoding="utf-8")
        written.append(path)
    return written


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _enable_logging(args.verbose)

    try:
        job = load_config(args.config)
    except OSError as e:
        print(f"[error] cannot read {args.config}: {e}", file=sys.stderr)
        return 2
    except HypmirrorException as e:
        print(f"[error] {e}", file=sys.stderr)
        return exit_code_for(e)

    tasks = None if args.task == "run" else [Task(args.task)]
    bundle = run(job, tasks)
    fmt = args.format or job.output.format
    out = args.out or job.output.directory

    if out is not None:
        write_reports(bundle, out, fmt)
    elif fmt == "text":
        sys.stdout.write(render_text(bundle))
    else:
        sys.stdout.write(bundle.to_json() + "\n")

    code = bundle.exit_code
    if args.svg or job.output.svg:
        try:
            _write_svg(job, Path(out) if out is not None else Path("."))
        except HypmirrorException as e:
            print(f"[error] {e}", file=sys.stderr)
            code = max(code, exit_code_for(e))
    return code


if __name__ == "__main__":
    sys.exit(main())
