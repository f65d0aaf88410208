"""CSV ingestion, CSV/JSON serialisation of results.

Undefined metrics are written as ``NA`` in CSV and ``null`` in JSON. Floats
are written with ``repr`` so every emitted CSV re-parses to identical values.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import FormatError, InsufficientDataError, ValidationError
from .signals import MetricRow, ScoredSample, to_arrays

INPUT_HEADER = ("score", "label")
SWEEP_HEADER = ("threshold", "accuracy", "precision", "recall", "f1", "mcc")
CURVES_HEADER = ("bin_lo", "bin_hi", "tr_density", "fr_density")
HISTORY_HEADER = ("epoch", "loss", "accuracy", "mcc", "kl_separation")
NA = "NA"


@dataclass(frozen=True)
class Dataset:
    samples: tuple[ScoredSample, ...]
    source: str
    sha256: str = ""

    def __post_init__(self):
        if not self.samples:
            raise InsufficientDataError(f"{self.source}: no samples")

    @cached_property
    def _arrays(self):
        return to_arrays(self.samples)

    @property
    def scores(self) -> np.ndarray:
        return self._arrays[0]

    @property
    def labels(self) -> np.ndarray:
        return self._arrays[1]


def parse_csv(data: bytes, source: str = "<bytes>") -> Dataset:
    """Parse ``score,label`` CSV bytes; errors name the offending line."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{source}: not valid UTF-8 ({exc})") from exc
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines or tuple(lines[0].split(",")) != INPUT_HEADER:
        got = lines[0] if lines else ""
        raise FormatError(f"{source}: line 1: expected header 'score,label', got {got!r}",
                          line=1)
    samples = []
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if len(row) != 2:
            raise FormatError(f"{source}: line {lineno}: expected 2 fields, got {len(row)}",
                              line=lineno)
        raw_score, raw_label = row
        try:
            score = float(raw_score)
        except ValueError:
            raise FormatError(f"{source}: line {lineno}: cannot parse score {raw_score!r}",
                              line=lineno) from None
        if raw_label.strip() not in ("0", "1"):
            raise FormatError(f"{source}: line {lineno}: label must be 0 or 1, "
                              f"got {raw_label!r}", line=lineno)
        if not (math.isfinite(score) and 0.0 <= score <= 1.0):
            raise ValidationError(f"{source}: line {lineno}: score {score!r} outside [0, 1]",
                                  line=lineno)
        samples.append(ScoredSample(score, int(raw_label)))
    if not samples:
        raise InsufficientDataError(f"{source}: no data rows")
    return Dataset(tuple(samples), source, hashlib.sha256(data).hexdigest())


def load_csv(path) -> Dataset:
    path = Path(path)
    return parse_csv(path.read_bytes(), str(path))


def fmt(value) -> str:
    """CSV cell for a number, bool or undefined marker."""
    if value is None:
        return NA
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def parse_cell(cell: str) -> Optional[float]:
    return None if cell == NA else float(cell)


def write_table(header: Sequence[str], rows: Iterable[Sequence], out) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def read_table(text: str, header: Sequence[str]) -> list[list[Optional[float]]]:
    lines = text.splitlines()
    if not lines or tuple(lines[0].split(",")) != tuple(header):
        raise FormatError(f"expected header {','.join(header)!r}")
    return [[parse_cell(c) for c in line.split(",")] for line in lines[1:] if line]


def write_sweep(rows: Sequence[MetricRow], out) -> None:
    write_table(SWEEP_HEADER, ([r.threshold, r.accuracy, r.precision, r.recall, r.f1, r.mcc]
                               for r in rows), out)


def read_sweep(text: str) -> list[MetricRow]:
    return [MetricRow(*vals) for vals in read_table(text, SWEEP_HEADER)]


def write_curves(curves, out) -> None:
    e = curves.edges
    write_table(CURVES_HEADER, zip(e[:-1], e[1:], curves.tr_density, curves.fr_density), out)


def read_curves(text: str):
    return read_table(text, CURVES_HEADER)


def write_history(history, out) -> None:
    write_table(HISTORY_HEADER, ([h.epoch, h.loss, h.accuracy, h.mcc, h.kl_separation]
                                 for h in history), out)


def read_history(text: str):
    rows = read_table(text, HISTORY_HEADER)
    return [[int(r[0])] + r[1:] for r in rows]


def to_text(writer, *args) -> str:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()


# --- JSON report --------------------------------------------------------------

SCHEMA_ID = "betasignal/analysis-report/v1"


def _clean(obj):
    """Recursively convert numpy scalars/arrays and tuples to JSON-ready values."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


@dataclass
class AnalysisReport:
    command: str
    version: str
    input: Optional[dict] = None
    timestamp: Optional[str] = None
    sections: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        body = {
            "schema": SCHEMA_ID,
            "tool": "betasignal",
            "version": self.version,
            "command": self.command,
            "timestamp": self.timestamp,
            "input": self.input,
            "fit": None,
            "divergence": None,
            "sweep": None,
            "stability": None,
            "credible_intervals": None,
            "bounds": None,
            "curves": None,
            "training": None,
        }
        body.update(self.sections)
        return _clean(body)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, allow_nan=False) + "\n"


def input_block(ds: Dataset) -> dict:
    n_pos = int(np.sum(ds.labels == 1))
    return {
        "source": ds.source,
        "sha256": ds.sha256,
        "n_samples": len(ds.samples),
        "n_positive": n_pos,
        "n_negative": len(ds.samples) - n_pos,
    }
