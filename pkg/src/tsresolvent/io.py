"""Serialization helpers: complex arrays as ``[re, im]`` pairs, CSV tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def complex_to_json(a) -> list:
    """Nested list with every complex entry written as ``[re, im]``."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


class _Encoder(json.JSONEncoder):
    def default(self, o):
        if isinstance(o, np.ndarray):
            if np.iscomplexobj(o):
                return complex_to_json(o)
            return o.tolist()
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        if isinstance(o, complex):
            return [o.real, o.imag]
        return super().default(o)


def dump_json(obj, path=None, indent: int = 1) -> str:
    """Serialize ``obj`` (numpy aware); write it to ``path`` when given."""
    text = json.dumps(obj, cls=_Encoder, indent=indent)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence],
              comments: Sequence[str] = ()) -> None:
    """CSV with optional leading ``#`` comment lines (config, version)."""
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def read_csv(path) -> tuple[list, list]:
    """Read a CSV written by :func:`write_csv`; returns ``(header, rows)``."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x
