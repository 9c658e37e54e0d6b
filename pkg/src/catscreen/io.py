"""CSV/JSON ingestion and emission.

The one ingestion format is a headered CSV with a designated response
column.  Integer-valued feature columns become level indices (0/1/2
additive genotype coding is the expected convention); any non-integer
feature column switches the whole file to numeric-matrix mode.  An
optional JSON sidecar maps feature names to level-score lists.  Every
artifact written next to a result embeds the seed and the resolved
configuration so runs can be audited.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import CategoricalDesign, ResponseVector, ScreenResult
from .errors import DatasetError

SIDECAR_SCHEMA_VERSION = 1


def _parse_cell(text: str, row: int, col: str):
    t = text.strip()
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        raise DatasetError(f"row {row}, column {col!r}: cannot parse {text!r}") from None


def load_dataset(path, response_col: str = "y", scores_path=None):
    """Read a dataset CSV into (design | matrix, response).

    Returns a :class:`CategoricalDesign` when every feature column is
    integer-valued, otherwise a plain float matrix.  The response is
    binary when its values are all 0/1 integers, continuous when float;
    integer values outside {0, 1} are rejected.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if response_col not in header:
            raise DatasetError(f"{path}: response column {response_col!r} not in header")
        rows = []
        for i, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: row {i} has {len(row)} fields, header has {len(header)}")
            rows.append([_parse_cell(c, i, header[k]) for k, c in enumerate(row)])
    if not rows:
        raise DatasetError(f"{path}: no observations")
    y_idx = header.index(response_col)
    feature_names = [h for k, h in enumerate(header) if k != y_idx]
    raw = np.array(rows, dtype=np.float64)
    y_raw = raw[:, y_idx]
    x_raw = np.delete(raw, y_idx, axis=1)
    y_integral = np.all(y_raw == np.floor(y_raw))
    if y_integral:
        if not np.isin(y_raw, (0.0, 1.0)).all():
            bad = int(np.nonzero(~np.isin(y_raw, (0.0, 1.0)))[0][0])
            raise DatasetError(
                f"{path}: row {bad + 2}: binary response must be 0 or 1, "
                f"got {y_raw[bad]!r}")
        y = ResponseVector.binary(y_raw.astype(np.int64))
    else:
        y = ResponseVector.continuous(y_raw)
    if np.all(x_raw == np.floor(x_raw)):
        if x_raw.min() < 0:
            raise DatasetError(f"{path}: negative level index in feature columns")
        scores = None
        if scores_path is not None:
            scores = _load_scores(scores_path, feature_names)
        design = CategoricalDesign.from_levels(
            x_raw.astype(np.int64), level_scores=scores, feature_names=feature_names)
        return design, y
    return x_raw, y


def _load_scores(scores_path, feature_names):
    with Path(scores_path).open() as fh:
        table = json.load(fh)
    missing = [n for n in feature_names if n not in table]
    if missing:
        raise DatasetError(f"score file missing features: {missing[:5]}")
    return [table[n] for n in feature_names]


def _format_value(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(float(v))


def save_dataset(design_or_matrix, y: ResponseVector, path,
                 response_col: str = "y") -> None:
    """Write a dataset CSV that :func:`load_dataset` reads back losslessly."""
    path = Path(path)
    if isinstance(design_or_matrix, CategoricalDesign):
        names = list(design_or_matrix.names())
        cols = design_or_matrix.levels
        integral = True
    else:
        mat = np.asarray(design_or_matrix, dtype=np.float64)
        names = [f"x{j + 1}" for j in range(mat.shape[1])]
        cols = mat
        integral = False
    yv = y.values
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + [response_col])
        for i in range(cols.shape[0]):
            if integral:
                row = [str(int(v)) for v in cols[i]]
            else:
                row = [_format_value(v) for v in cols[i]]
            row.append(_format_value(float(yv[i])))
            writer.writerow(row)


def save_screen_result(result: ScreenResult, feature_names, path) -> None:
    """Ranked CSV: feature, score, rank (rank 1 is the top score)."""
    path = Path(path)
    pos = result.positions()
    order = result.ranking
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "score", "rank"])
        for j in order:
            writer.writerow([feature_names[j], repr(float(result.scores[j])),
                             int(pos[j]) + 1])


def write_sidecar(path, *, command: str, config: dict, seed, wallclock: float,
                  extra: dict | None = None) -> None:
    """Provenance JSON written next to every output artifact."""
    payload = {
        "schema_version": SIDECAR_SCHEMA_VERSION,
        "tool": "catscreen",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": config,
        "wallclock_seconds": wallclock,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=1, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj)}")
