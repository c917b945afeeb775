"""Versioned JSON checkpoints of a State and its run metadata."""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np

from .models import Parameters, State
from .spectral import Grid, SpectralField

logger = logging.getLogger(__name__)

CHECKPOINT_HEADER = "CLAYER1"
CHECKPOINT_SUFFIX = ".clayer"


class CheckpointError(ValueError):
    """Checkpoint file is missing, unreadable or of another format."""


def _encode(f: SpectralField) -> dict[str, Any]:
    return {"re": f.coeffs.real.tolist(), "im": f.coeffs.imag.tolist()}


def _decode(data: dict[str, Any], grid: Grid) -> SpectralField:
    coeffs = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    return SpectralField(grid, coeffs)


def save_checkpoint(path: Path, state: State, params: Parameters) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": CHECKPOINT_HEADER,
        "t": state.t,
        "grid": asdict(state.grid),
        "params": asdict(params),
        "fields": {
            "u": _encode(state.u),
            "ut": _encode(state.ut),
            "b1": _encode(state.b1),
            "b1t": _encode(state.b1t),
        },
    }
    path.write_text(json.dumps(payload))
    logger.debug("Wrote checkpoint %s at t=%.4f", path, state.t)
    return path


def load_checkpoint(path: Path) -> tuple[State, Parameters]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if payload.get("format") != CHECKPOINT_HEADER:
        raise CheckpointError(f"{path} is not a {CHECKPOINT_HEADER} checkpoint")
    grid = Grid(**payload["grid"])
    fields = {name: _decode(payload["fields"][name], grid) for name in ("u", "ut", "b1", "b1t")}
    state = State(t=float(payload["t"]), **fields)
    return state, Parameters(**payload["params"])
