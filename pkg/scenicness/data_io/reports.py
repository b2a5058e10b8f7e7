from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict

import yaml

from scenicness.errors import ConfigError

log = logging.getLogger("scenicness.data_io")

REPORT_FORMAT_VERSION = "1.0"


def save_report(report: Dict[str, Any] | Any, path: str | Path) -> Path:
    """Write a JSON report; objects with ``to_dict`` are converted first.

    ``format_version`` is added unless the report already carries one.
    """
    data = report.to_dict() if hasattr(report, "to_dict") else dict(report)
    data = {"format_version": REPORT_FORMAT_VERSION, **data}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    log.info(f"[data_io] wrote report {path}")
    return path


def load_options(path: str | Path) -> Dict[str, Any]:
    """Read a YAML or JSON options file into a mapping."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"[data_io] unable to parse {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"[data_io] {path} must contain a mapping")
    return data
