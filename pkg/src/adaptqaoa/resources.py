"""CNOT and parameter accounting.

A ZZ term exponential and any two-qubit Pauli-string exponential each cost
two CNOTs (basis change, CNOT, Rz, CNOT); single-qubit rotations are free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .records import RunRecord

THRESHOLD = 0.05


@dataclass(frozen=True)
class ResourceCount:
    cnot_total: int
    n_parameters: int
    layers_used: int
    reached_threshold: bool


def cnot_cost_of_layer(h, mixer) -> int:
    cost = 2 * sum(1 for _, _, c in h.zz_terms if c != 0)
    terms = getattr(mixer, "terms", None) or (mixer,)
    for term in terms:
        k = len(term.factors)
        cost += 2 * (k - 1) if k > 1 else 0
    return cost


def resources_to_threshold(record: RunRecord, threshold: float = THRESHOLD) -> ResourceCount:
    if record.n_layers < 1:
        raise ValueError("record has no optimized layers")
    for row in record.rows[1:]:
        if row.norm_error <= threshold:
            return ResourceCount(row.cnot_cumulative, row.n_params, row.layer, True)
    last = record.final
    return ResourceCount(last.cnot_cumulative, last.n_params, last.layer, False)


@dataclass
class ThresholdSummary:
    algo: str
    mode: str
    pool: str
    mean_cnot: float
    std_cnot: float
    mean_params: float
    std_params: float
    n_excluded: int
    n_included: int

    CSV_COLUMNS = ("algo", "mode", "pool", "mean_cnot", "std_cnot", "mean_params",
                   "std_params", "n_excluded")


def threshold_summary(records, threshold: float = THRESHOLD) -> ThresholdSummary:
    """Mean/std of resources over runs that reached the threshold; the rest are excluded."""
    records = list(records)
    counts = [resources_to_threshold(r, threshold) for r in records]
    hit = [c for c in counts if c.reached_threshold]
    cnots = np.array([c.cnot_total for c in hit], dtype=float)
    params = np.array([c.n_parameters for c in hit], dtype=float)
    nan = float("nan")
    first = records[0]
    return ThresholdSummary(
        algo=first.algo, mode=first.mode, pool=first.pool,
        mean_cnot=float(cnots.mean()) if hit else nan,
        std_cnot=float(cnots.std()) if hit else nan,
        mean_params=float(params.mean()) if hit else nan,
        std_params=float(params.std()) if hit else nan,
        n_excluded=len(counts) - len(hit),
        n_included=len(hit),
    )
