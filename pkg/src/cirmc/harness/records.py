"""Flat run records and deterministic CSV emission.

Every experiment emits rows of one shape so downstream tooling needs a
single reader. Writers sort rows by a total key and format floats with
``repr`` so the same records always produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from ..evaluation import KS_CSV_HEADER

__all__ = ["RECORD_COLUMNS", "RunRecord", "write_records_csv", "write_ks_csv", "read_records_csv"]

RECORD_COLUMNS = ("experiment", "method", "seed", "h", "n_fraction", "iteration", "metric", "value")


@dataclass(frozen=True)
class RunRecord:
    """One measurement from one run cell. h / n_fraction may be None."""

    experiment: str
    method: str
    seed: int
    h: float | None
    n_fraction: float | None
    iteration: int
    metric: str
    value: float

    def row(self) -> tuple:
        return (
            self.experiment,
            self.method,
            str(self.seed),
            "" if self.h is None else repr(float(self.h)),
            "" if self.n_fraction is None else repr(float(self.n_fraction)),
            str(self.iteration),
            self.metric,
            repr(float(self.value)),
        )


def _sort_key(rec: RunRecord):
    return (
        rec.experiment,
        rec.method,
        rec.seed,
        rec.h is not None,
        rec.h or 0.0,
        rec.n_fraction is not None,
        rec.n_fraction or 0.0,
        rec.iteration,
        rec.metric,
    )


def write_records_csv(path, records) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for rec in sorted(records, key=_sort_key):
            writer.writerow(rec.row())


def read_records_csv(path) -> list:
    records = []
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RECORD_COLUMNS:
            raise ValueError(f"unexpected header in {path}")
        for row in reader:
            records.append(
                RunRecord(
                    experiment=row["experiment"],
                    method=row["method"],
                    seed=int(row["seed"]),
                    h=float(row["h"]) if row["h"] else None,
                    n_fraction=float(row["n_fraction"]) if row["n_fraction"] else None,
                    iteration=int(row["iteration"]),
                    metric=row["metric"],
                    value=float(row["value"]),
                )
            )
    return records


def write_ks_csv(path, rows) -> None:
    """Write the KS summary table; rows are tuples matching KS_CSV_HEADER."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(KS_CSV_HEADER)
        def key(row):
            frac = row[2]
            return (row[1], frac != "", frac if frac != "" else 0.0, row[0])

        for row in sorted(rows, key=key):
            writer.writerow([str(c) for c in row])
