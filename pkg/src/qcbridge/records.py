"""Run records and their CSV/JSON persistence.

Time series go to CSV (fixed column order, repr-formatted doubles so a
read-back reproduces the exact float); configuration echoes and summaries
go to JSON. Matrices (|rho| snapshots) are written as plain numeric CSV.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

SCHEMA_VERSION = 1
RNG_NAME = "pcg64"


@dataclass
class TrajectoryHistory:
    """Positions of a trajectory ensemble at recorded times."""

    times: list[float]
    positions: np.ndarray  # (n_records, n_traj)
    ks_distance: list[float]
    seed: int
    rng_name: str = RNG_NAME
    frozen_fraction: float = 0.0
    wrap_count: int = 0

    def equals(self, other: "TrajectoryHistory") -> bool:
        return (
            self.times == other.times
            and np.array_equal(self.positions, other.positions)
            and self.ks_distance == other.ks_distance
            and self.seed == other.seed
            and self.rng_name == other.rng_name
            and self.frozen_fraction == other.frozen_fraction
            and self.wrap_count == other.wrap_count
        )


@dataclass
class RunRecord:
    """Self-describing record of one run: config echo plus the time series."""

    config: dict
    columns: list[str]
    rows: list[list[float]]
    schema_version: int = SCHEMA_VERSION
    seed: int | None = None
    rng_name: str | None = None
    error: str | None = None
    summary: dict = field(default_factory=dict)
    final_state: Any = field(default=None, compare=False, repr=False)
    trajectories: TrajectoryHistory | None = field(default=None, compare=False, repr=False)

    def final_row(self) -> dict[str, float]:
        if not self.rows:
            return {}
        return dict(zip(self.columns, self.rows[-1]))

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])


def _format_float(x: float) -> str:
    return repr(float(x))


def write_timeseries_csv(path: Path, columns: list[str], rows: list[list[float]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_float(x) for x in row])


def read_timeseries_csv(path: Path) -> tuple[list[str], list[list[float]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    return columns, rows


def write_matrix_csv(path: Path, matrix: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.asarray(matrix):
            writer.writerow([_format_float(x) for x in row])


def read_matrix_csv(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([[float(x) for x in row] for row in csv.reader(fh)])


def save_run_record(record: RunRecord, outdir: Path) -> dict[str, Path]:
    """Persist a record; returns the paths written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    ts_path = outdir / "timeseries.csv"
    write_timeseries_csv(ts_path, record.columns, record.rows)
    paths["timeseries"] = ts_path

    summary = {
        "schema_version": record.schema_version,
        "config": record.config,
        "columns": record.columns,
        "seed": record.seed,
        "rng_name": record.rng_name,
        "error": record.error,
        "summary": record.summary,
    }
    sm_path = outdir / "summary.json"
    with open(sm_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["summary"] = sm_path

    if record.trajectories is not None:
        tr = record.trajectories
        tr_path = outdir / "trajectories.csv"
        header = ["t", "ks_distance"] + [f"x{i}" for i in range(tr.positions.shape[1])]
        rows = [
            [t, ks] + list(pos)
            for t, ks, pos in zip(tr.times, tr.ks_distance, tr.positions)
        ]
        write_timeseries_csv(tr_path, header, rows)
        meta_path = outdir / "trajectories.json"
        with open(meta_path, "w") as fh:
            json.dump(
                {
                    "seed": tr.seed,
                    "rng_name": tr.rng_name,
                    "frozen_fraction": tr.frozen_fraction,
                    "wrap_count": tr.wrap_count,
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
        paths["trajectories"] = tr_path
        paths["trajectories_meta"] = meta_path
    return paths


def load_run_record(outdir: Path) -> RunRecord:
    """Re-read a persisted record; field-identical to what was saved."""
    outdir = Path(outdir)
    columns, rows = read_timeseries_csv(outdir / "timeseries.csv")
    with open(outdir / "summary.json") as fh:
        summary = json.load(fh)
    record = RunRecord(
        config=summary["config"],
        columns=columns,
        rows=rows,
        schema_version=summary["schema_version"],
        seed=summary["seed"],
        rng_name=summary["rng_name"],
        error=summary["error"],
        summary=summary["summary"],
    )
    tr_path = outdir / "trajectories.csv"
    if tr_path.exists():
        tcols, trows = read_timeseries_csv(tr_path)
        with open(outdir / "trajectories.json") as fh:
            meta = json.load(fh)
        positions = np.array([row[2:] for row in trows])
        record.trajectories = TrajectoryHistory(
            times=[row[0] for row in trows],
            positions=positions,
            ks_distance=[row[1] for row in trows],
            seed=meta["seed"],
            rng_name=meta["rng_name"],
            frozen_fraction=meta["frozen_fraction"],
            wrap_count=meta["wrap_count"],
        )
    return record
