"""JSON documents exchanged by the command line tools.

fiducial            {"dim", "amplitudes": [[re, im], ...], "potential", "deviation"}
probability vector  {"n", "entries"}
conditional matrix  {"m", "n", "rows"}   rows[j][i] = r(j|i)
report              {"command", "config", "metrics", "pass", "wall_time"}

Floats are written with ``repr``, the shortest string that reads back to the
identical double, so files round-trip bit for bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .hermitian import TOL_NORM


class FormatError(ValueError):
    """A document is missing fields or has inconsistent contents."""


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _load(path) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return doc


def _require(doc: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}")


def fiducial_document(psi: np.ndarray, potential: float, deviation: float) -> dict:
    return {
        "dim": int(psi.size),
        "amplitudes": [[float(z.real), float(z.imag)] for z in psi],
        "potential": float(potential),
        "deviation": float(deviation),
    }


def fiducial_from_document(doc: dict) -> np.ndarray:
    _require(doc, "dim", "amplitudes")
    d = doc["dim"]
    amps = doc["amplitudes"]
    if not isinstance(d, int) or d < 2:
        raise FormatError(f"bad dim {d!r}")
    if not isinstance(amps, list) or len(amps) != d:
        raise FormatError(f"expected {d} amplitudes, got {len(amps) if isinstance(amps, list) else amps!r}")
    try:
        psi = np.array([complex(float(a[0]), float(a[1])) for a in amps])
    except (TypeError, ValueError, IndexError) as exc:
        raise FormatError("amplitudes must be [re, im] pairs") from exc
    if abs(np.linalg.norm(psi) - 1.0) > TOL_NORM:
        raise FormatError("fiducial amplitudes are not unit norm")
    return psi


def write_fiducial(path, psi, potential, deviation) -> None:
    Path(path).write_text(_dump(fiducial_document(psi, potential, deviation)))


def read_fiducial(path) -> np.ndarray:
    return fiducial_from_document(_load(path))


def prob_vector_document(p) -> dict:
    v = [float(x) for x in np.asarray(p, dtype=float).reshape(-1)]
    return {"n": len(v), "entries": v}


def prob_vector_from_document(doc: dict) -> np.ndarray:
    _require(doc, "n", "entries")
    entries = doc["entries"]
    if not isinstance(entries, list) or len(entries) != doc["n"]:
        raise FormatError("entries length does not match n")
    return np.array([float(x) for x in entries])


def write_prob_vector(path, p) -> None:
    Path(path).write_text(_dump(prob_vector_document(p)))


def read_prob_vector(path) -> np.ndarray:
    return prob_vector_from_document(_load(path))


def conditional_document(r) -> dict:
    entries = r.entries if hasattr(r, "entries") else np.asarray(r, dtype=float)
    m, n = entries.shape
    return {"m": int(m), "n": int(n), "rows": [[float(x) for x in row] for row in entries]}


def conditional_from_document(doc: dict) -> np.ndarray:
    _require(doc, "m", "n", "rows")
    rows = doc["rows"]
    if not isinstance(rows, list) or len(rows) != doc["m"]:
        raise FormatError("row count does not match m")
    if any(not isinstance(row, list) or len(row) != doc["n"] for row in rows):
        raise FormatError("row length does not match n")
    return np.array([[float(x) for x in row] for row in rows])


def write_conditional(path, r) -> None:
    Path(path).write_text(_dump(conditional_document(r)))


def read_conditional(path) -> np.ndarray:
    return conditional_from_document(_load(path))


def _clean(value):
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def report_document(command: str, config: dict, metrics: dict, passed: bool, wall_time: float) -> dict:
    metrics = _clean(metrics)
    for key, val in metrics.items():
        if isinstance(val, float) and not math.isfinite(val):
            raise FormatError(f"metric {key!r} is not finite")
    return {
        "command": command,
        "config": _clean(config),
        "metrics": metrics,
        "pass": bool(passed),
        "wall_time": float(wall_time),
    }


def dumps(doc: dict) -> str:
    return _dump(doc)


def load_document(path) -> dict:
    return _load(path)
