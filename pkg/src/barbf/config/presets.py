"""Bundled experiment presets shipped in ``barbf/data/experiments``."""
from __future__ import annotations

import json
import logging
from importlib import resources

from barbf.config.run_config import Experiment
from barbf.config.schema import experiment_from_dict

logger = logging.getLogger(__name__)

_PACKAGE = "barbf.data.experiments"


def preset_names() -> list[str]:
    return sorted(
        entry.name[: -len(".json")]
        for entry in resources.files(_PACKAGE).iterdir()
        if entry.name.endswith(".json")
    )


def load_preset(name: str) -> Experiment:
    """Load and validate the preset ``name`` (file stem, e.g. ``branin-barbf-desk``)."""
    entry = resources.files(_PACKAGE).joinpath(f"{name}.json")
    if not entry.is_file():
        raise ValueError(f"unknown preset '{name}'; available: {', '.join(preset_names())}")
    raw = json.loads(entry.read_text(encoding="utf-8"))
    raw.setdefault("name", name)
    logger.debug("Loaded preset %s", name)
    return experiment_from_dict(raw)
