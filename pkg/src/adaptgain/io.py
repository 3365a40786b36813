"""Trajectory CSV and run summary serialization."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .integrator import Trajectory

CSV_HEADER = ("t", "x", "g")


def _num(v) -> str:
    # float repr is the shortest string that round-trips exactly
    return repr(float(v))


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    lines = [",".join(CSV_HEADER)]
    lines.extend(f"{_num(t)},{_num(x)},{_num(g)}" for t, x, g in zip(traj.times, traj.x, traj.g))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_trajectory_csv(path: str | Path) -> Trajectory:
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected trajectory header {header!r}")
        rows = [tuple(float(v) for v in row) for row in reader if row]
    data = np.array(rows, dtype=np.float64).reshape(-1, 3)
    return Trajectory(data[:, 0].copy(), data[:, 1].copy(), data[:, 2].copy())


def write_json(payload: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def write_table(rows: list[dict], columns: list[str], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: _cell(row.get(c)) for c in columns})


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return _num(v)
    return v
