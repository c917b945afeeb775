"""CSV and JSON outputs of the command-line runs."""

import json
import logging
import math
from dataclasses import asdict
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd

from .models import EnergyReport, InequalityReport

logger = logging.getLogger(__name__)

SUMMARY_SCHEMA = "clayer/1"
FLOAT_FORMAT = "%.17g"

REPORT_COLUMNS = [
    "t",
    "Es",
    "Es_half",
    "Es_one",
    "Ds0",
    "Ds_half",
    "Ds_one",
    "Ds_threehalf",
    "tau_t",
    "tau_empirical",
    "decay_slack",
    "master_slack",
]


def reports_to_frame(
    reports: Sequence[EnergyReport],
    decay: Optional[InequalityReport] = None,
    master: Optional[InequalityReport] = None,
) -> pd.DataFrame:
    """One row per monitored time; slack columns stay NaN when the check was not run."""
    frame = pd.DataFrame([asdict(r) for r in reports])
    if frame.empty:
        return pd.DataFrame(columns=REPORT_COLUMNS)
    for column, report in (("decay_slack", decay), ("master_slack", master)):
        if report is None or len(report.slack) != len(frame):
            frame[column] = math.nan
        else:
            frame[column] = report.slack
    return frame[REPORT_COLUMNS]


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("Wrote %s (%d rows)", path, len(frame))
    return path


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)


def _plain(value: Any) -> Any:
    """Make numpy scalars, arrays and non-finite floats JSON friendly."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Enum):
        return value.value
    return value


def inequality_summary(report: InequalityReport) -> dict[str, Any]:
    return {
        "passes": report.all_pass,
        "samples": int(len(report.times)),
        "worst_slack": report.worst_slack,
        "rel_tol": report.rel_tol,
        "notes": report.notes,
    }


def write_summary(
    path: Path,
    command: str,
    config: dict[str, Any],
    results: dict[str, Any],
    exit_code: int,
) -> Path:
    """Self-describing JSON record of one command: resolved config, results and exit code."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema": SUMMARY_SCHEMA,
        "command": command,
        "exit_code": exit_code,
        "config": _plain(config),
        "results": _plain(results),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    logger.info("Wrote %s", path)
    return path


def read_summary(path: Path) -> dict[str, Any]:
    payload = json.loads(Path(path).read_text())
    if payload.get("schema") != SUMMARY_SCHEMA:
        raise ValueError(f"{path} is not a {SUMMARY_SCHEMA} summary")
    return payload
