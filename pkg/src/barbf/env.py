"""Environment bootstrap for barbf.

Loads ``.env`` from ``BARBF_HOME`` when set, otherwise from the nearest
parent directory of this file, and fills in defaults for the variables the
command line reads. Safe to call more than once.
"""
from __future__ import annotations

import logging
import os
from pathlib import Path

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

_loaded = False
_PATH_VARS = ("BARBF_RESULTS_DIR",)


def _find_dotenv() -> Path | None:
    """Walk upward from this file to find the nearest .env."""
    for parent in Path(__file__).resolve().parents:
        candidate = parent / ".env"
        if candidate.is_file():
            return candidate
    return None


def load_env() -> None:
    """Load .env and set ``BARBF_RESULTS_DIR`` and ``BARBF_LOG_LEVEL`` defaults.

    Values already present in the process environment win over ``.env``.
    Relative paths in ``.env`` are resolved against the file's directory.
    """
    global _loaded
    if _loaded:
        return
    _loaded = True

    home = os.environ.get("BARBF_HOME")
    found = Path(home) / ".env" if home else _find_dotenv()
    if found is not None and found.is_file():
        load_dotenv(found, override=False)
        for var in _PATH_VARS:
            value = os.environ.get(var)
            if value and not Path(value).is_absolute():
                os.environ[var] = str((found.parent / value).resolve())
        logger.debug("Loaded environment from %s", found)

    os.environ.setdefault("BARBF_RESULTS_DIR", str(Path.cwd() / "results"))
    os.environ.setdefault("BARBF_LOG_LEVEL", "INFO")


def results_dir() -> Path:
    load_env()
    return Path(os.environ["BARBF_RESULTS_DIR"])
