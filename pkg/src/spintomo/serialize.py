"""JSON and CSV interchange formats.

Operators serialize as flat row-major lists of [re, im] pairs; quorums and
dual frames as {"dim", "elements", "labels"}.  All floats go through
Python's shortest round-trip repr (JSON) or 17 significant digits (CSV),
so outputs are byte-stable for identical inputs.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .estimator import RunStats
from .frames import DualFrame, Quorum
from .liouville import as_operator
from .spin import Direction


def op_to_pairs(a: np.ndarray) -> list[list[float]]:
    flat = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def op_from_pairs(pairs: Sequence, dim: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (dim * dim, 2):
        raise ValueError(f"expected {dim * dim} [re, im] pairs, got shape {arr.shape}")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)


def op_to_json_dict(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"dim": int(a.shape[0]), "entries": op_to_pairs(a)}


def op_from_json_dict(doc: dict) -> np.ndarray:
    dim = int(doc["dim"])
    return as_operator(op_from_pairs(doc["entries"], dim))


def quorum_to_json_dict(q: Quorum) -> dict:
    return {
        "dim": q.dim,
        "elements": [op_to_pairs(c) for c in q.elements],
        "labels": list(q.labels),
    }


def quorum_from_json_dict(doc: dict) -> Quorum:
    dim = int(doc["dim"])
    elements = [op_from_pairs(p, dim) for p in doc["elements"]]
    labels = doc.get("labels")
    return Quorum.from_elements(elements, labels)


def dual_to_json_dict(dual: DualFrame, labels: Sequence[str] | None = None) -> dict:
    doc = {
        "dim": dual.dim,
        "elements": [op_to_pairs(b) for b in dual.elements],
        "labels": list(labels) if labels is not None else [f"B_{n}" for n in range(len(dual))],
        "kept_mask": [bool(k) for k in dual.kept_mask],
    }
    return doc


def dual_from_json_dict(doc: dict) -> DualFrame:
    dim = int(doc["dim"])
    elements = [op_from_pairs(p, dim) for p in doc["elements"]]
    kept = doc.get("kept_mask")
    return DualFrame.from_elements(elements, kept)


def directions_to_json_list(directions: Sequence[Direction]) -> list[dict]:
    return [{"theta": float(d.theta), "phi": float(d.phi)} for d in directions]


def directions_from_json_list(doc) -> list[Direction]:
    return [Direction(float(item["theta"]), float(item["phi"])) for item in doc]


def run_stats_to_json_dict(stats: RunStats, threads: int | None = None) -> dict:
    doc = {
        "estimator": stats.estimator,
        "n_samples": stats.n_samples,
        "n_blocks": stats.n_blocks,
        "mean": float(stats.mean),
        "error_bar": float(stats.error_bar),
        "block_means": [float(b) for b in stats.block_means],
        "seed": stats.seed,
        "convention": stats.convention,
    }
    if threads is not None:
        doc["threads"] = int(threads)
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def load_json_file(path: str):
    """Parse a JSON file, annotating syntax errors with line context."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        line = text.splitlines()[err.lineno - 1] if text.splitlines() else ""
        raise ValueError(
            f"{path}:{err.lineno}:{err.colno}: {err.msg}\n  {line}"
        ) from err


def csv_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) if isinstance(c, (int, str)) else csv_float(c) for c in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
