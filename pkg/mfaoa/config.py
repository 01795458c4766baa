"""Run configuration and logging setup.

Environment Configuration:
- MFAOA_THREADS: worker pool size when --threads is not given
- MFAOA_LOG_LEVEL: console log level (default INFO)
- MFAOA_LOG_DIR: directory for the error log file (no file log when unset)
- MFAOA_ERROR_LOG: error log file name (default mfaoa_errors.log)

Options are resolved in the order command defaults, then the JSON config
file, then explicit command-line flags.
"""

import json
import logging
import os
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import MFAOAError

SCHEMA_VERSION = 1

logger = logging.getLogger(__name__)

DEFAULTS: dict[str, dict[str, Any]] = {
    "gen": {
        "kind": "sk",
        "n": 11,
        "seed": 0,
        "weights": None,
        "out": None,
    },
    "solve": {
        "instance": None,
        "tau": 0.5,
        "p": 1000,
        "refine": 0,
        "two_flip": False,
        "break_symmetry": False,
        "record_trajectory": None,
        "trajectory_out": None,
        "out": None,
    },
    "fluct": {
        "instance": None,
        "trajectory": None,
        "tau": 0.5,
        "p": 1000,
        "slices": 2000,
        "easy_ratio": 2.0 / 3.0,
        "threads": None,
        "out": None,
    },
    "exact": {
        "instance": None,
        "mode": "ground",
        "s_grid": 101,
        "k": 4,
        "p": 4,
        "tau": 0.5,
        "optimize": 0,
        "out": None,
    },
    "bench": {
        "kind": "sk",
        "n_list": [20, 30, 50],
        "count": 50,
        "tau": 0.5,
        "p": 1000,
        "two_flip": False,
        "exact": False,
        "refine": 0,
        "seed0": 0,
        "gumbel_m": 6,
        "qaoa_layers": [],
        "qaoa_optimize": 0,
        "timings": False,
        "out_dir": "bench_out",
        "threads": None,
    },
    "serve": {},
}


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of one command invocation."""

    command: str
    options: dict[str, Any] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def get(self, key: str, default: Any = None) -> Any:
        return self.options.get(key, default)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "options": dict(sorted(self.options.items())),
        }


def load_config_file(path: str | Path, *, full: bool = False) -> dict[str, Any]:
    """Read a JSON config file and return its option overrides.

    Args:
        path: Config file location
        full: Apply the ``full`` section on top of ``options``

    Returns:
        Flat option dictionary (keys use underscores)
    """
    try:
        with open(path, encoding="utf-8") as fh:
            document = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise MFAOAError(f"Cannot read config file {path}: {e}") from e

    version = document.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise MFAOAError(
            f"Unsupported config schema_version {version} (expected {SCHEMA_VERSION})"
        )

    options = {_normalize_key(k): v for k, v in document.get("options", {}).items()}
    if full:
        options.update(
            {_normalize_key(k): v for k, v in document.get("full", {}).items()}
        )
    return options


def resolve_config(
    command: str,
    cli_options: dict[str, Any],
    config_path: str | Path | None = None,
    *,
    full: bool = False,
) -> RunConfig:
    """Merge defaults, config file and explicit flags into a RunConfig."""
    options = dict(DEFAULTS.get(command, {}))
    if config_path is not None:
        file_options = load_config_file(config_path, full=full)
        unknown = set(file_options) - set(options)
        if unknown:
            logger.warning(
                "Ignoring unknown config keys for %s: %s", command, sorted(unknown)
            )
        options.update({k: v for k, v in file_options.items() if k in options})
    options.update(cli_options)
    return RunConfig(command=command, options=options)


def resolve_threads(threads: int | None = None) -> int:
    """Worker count from the flag, then MFAOA_THREADS, then the CPU count."""
    if threads is not None:
        return max(1, int(threads))
    env_threads = os.getenv("MFAOA_THREADS")
    if env_threads:
        try:
            return max(1, int(env_threads))
        except ValueError:
            logger.warning("Ignoring non-integer MFAOA_THREADS=%r", env_threads)
    return os.cpu_count() or 1


def _normalize_key(key: str) -> str:
    return key.replace("-", "_")


def setup_logging(level: str | None = None) -> Path | None:
    """Set up console logging on stderr and an optional error log file.

    Args:
        level: Console level name, overriding MFAOA_LOG_LEVEL

    Returns:
        Path of the error log file, or None when file logging is disabled
    """
    level_name = (level or os.getenv("MFAOA_LOG_LEVEL", "INFO")).upper()
    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG)

    for handler in list(root_logger.handlers):
        if getattr(handler, "_mfaoa_handler", False):
            root_logger.removeHandler(handler)
            handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, level_name, logging.INFO))
    console_handler.setFormatter(
        logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    )
    console_handler._mfaoa_handler = True  # noqa: SLF001
    root_logger.addHandler(console_handler)

    log_dir = os.getenv("MFAOA_LOG_DIR")
    if not log_dir:
        return None

    log_file = os.getenv("MFAOA_ERROR_LOG", "mfaoa_errors.log")
    Path(log_dir).mkdir(parents=True, exist_ok=True)
    log_path = Path(log_dir) / log_file

    file_handler = logging.FileHandler(log_path, mode="a", encoding="utf-8")
    file_handler.setLevel(logging.ERROR)
    file_handler.setFormatter(
        logging.Formatter(
            # pylint: disable=line-too-long
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s\n%(pathname)s:%(lineno)d in %(funcName)s()",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    )
    file_handler._mfaoa_handler = True  # noqa: SLF001
    root_logger.addHandler(file_handler)
    return log_path


def log_error_with_traceback(error: Exception, context: str = ""):
    """Log error with full traceback."""
    try:
        tb_str = traceback.format_exc()
        logger.error("Error in %s: %s\n\nFull traceback:\n%s", context, error, tb_str)
    except (OSError, PermissionError) as log_error:
        print(f"Failed to log error: {log_error}", file=sys.stderr)
        print(f"Original error: {error}", file=sys.stderr)
