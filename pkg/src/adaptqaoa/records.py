"""Per-layer run traces and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

CSV_COLUMNS = (
    "instance_id", "algo", "mode", "pool", "delta", "layer", "energy", "norm_error",
    "ent_middle", "ent_single_avg", "mixer_token", "cnot_cumulative", "n_params",
    "optimizer_evals",
)


@dataclass
class LayerRow:
    layer: int
    energy: float
    norm_error: float
    ent_middle: float
    ent_single_avg: float
    mixer_token: str
    cnot_cumulative: int
    n_params: int
    optimizer_evals: int


@dataclass
class RunRecord:
    instance_id: int
    algo: str
    mode: str
    pool: str
    delta: float
    rows: list[LayerRow] = field(default_factory=list)
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))
    selections: list = field(default_factory=list)
    start_energies: list[float] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def n_layers(self) -> int:
        return len(self.rows) - 1

    @property
    def tokens(self) -> list[str]:
        return [r.mixer_token for r in self.rows[1:]]

    @property
    def final(self) -> LayerRow:
        return self.rows[-1]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def csv_rows(self):
        for r in self.rows:
            yield {
                "instance_id": self.instance_id, "algo": self.algo, "mode": self.mode,
                "pool": self.pool, "delta": self.delta, **asdict(r),
            }


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(records, path=None) -> str:
    """Write records as CSV (one row per layer per instance); returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        for row in rec.csv_rows():
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    text = buf.getvalue()
    if path is not None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text)
        tmp.replace(path)
    return text


def read_csv(path) -> list[RunRecord]:
    records: dict[tuple, RunRecord] = {}
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            key = (int(raw["instance_id"]), raw["algo"], raw["mode"], raw["pool"], float(raw["delta"]))
            rec = records.get(key)
            if rec is None:
                rec = records[key] = RunRecord(*key)
            rec.rows.append(LayerRow(
                layer=int(raw["layer"]),
                energy=float(raw["energy"]),
                norm_error=float(raw["norm_error"]),
                ent_middle=float(raw["ent_middle"]),
                ent_single_avg=float(raw["ent_single_avg"]),
                mixer_token=raw["mixer_token"],
                cnot_cumulative=int(raw["cnot_cumulative"]),
                n_params=int(raw["n_params"]),
                optimizer_evals=int(raw["optimizer_evals"]),
            ))
    return list(records.values())
