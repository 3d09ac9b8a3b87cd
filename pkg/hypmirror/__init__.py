__version__ = "0.1.0"

from loguru import logger

from .arrangement import load_and_normalize
from .atlas import Atlas, build_atlas, verify_atlas
from .config import JobConfig, load_config, parse_config
from .mirror import mirror_equations
from .reports import run
from .tropical import build_tropical

logger.disable("hypmirror")


def enable_logging(enabled: bool = True) -> None:
    """Turn the package's log records on (or back off)."""
    if enabled:
        logger.enable("hypmirror")
    else:
        logger.disable("hypmirror")


__all__ = [
    "Atlas",
    "JobConfig",
    "build_atlas",
    "build_tropical",
    "enable_logging",
    "load_and_normalize",
    "load_config",
    "mirror_equations",
    "parse_config",
    "run",
    "verify_atlas",
]
