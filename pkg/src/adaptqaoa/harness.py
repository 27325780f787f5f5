"""Experiment orchestration: instance sweeps, delta comparisons, spectrum studies.

Instance ``k`` of a sweep always uses seed ``base_seed + k``, so every
algorithm/pool/delta variant of a comparison sees the same graphs.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import zlib
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np
from scipy import stats

from . import entanglement as ent
from .adapt import Connectivity, Mode, build_pool, grow_and_optimize, mode_hamiltonian
from .ansatz import AnsatzProgram, Reference, global_x, mixer_from_token, program_to_json
from .optimizer import OptimizerConfig
from .problem import ProblemInstance
from .records import RunRecord, write_csv
from .resources import THRESHOLD, ThresholdSummary, threshold_summary

log = logging.getLogger(__name__)

FULL_SCALE_INSTANCES = 512
DESK_INSTANCES = 50


@dataclass(frozen=True)
class ExperimentConfig:
    n_qubits: int = 6
    degree: int | None = None  # None -> n_qubits - 1 (complete graph)
    n_instances: int = DESK_INSTANCES
    base_seed: int = 0
    algo: str = "adapt"
    mode: str = "preserve"
    pool: str = "full"
    delta: float = 0.0
    f: float = 0.05
    gamma0: float = 0.01
    p_max: int | None = None  # None -> 15 for n <= 6, else 20
    x_tolerance: float = 1e-4
    f_tolerance: float = 1e-4
    max_evaluations: int | None = None
    initial_simplex_scale: float = 0.05
    restart: bool = False
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.degree is None:
            object.__setattr__(self, "degree", self.n_qubits - 1)
        if self.p_max is None:
            object.__setattr__(self, "p_max", 15 if self.n_qubits <= 6 else 20)
        if self.algo not in ("adapt", "qaoa"):
            raise ValueError(f"algo must be adapt or qaoa, got {self.algo!r}")
        Mode(self.mode)
        Connectivity(self.pool)
        if self.pool == "ladder" and self.n_qubits % 2:
            raise ValueError("ladder pool requires an even number of qubits")
        if not abs(self.delta) < 1:
            raise ValueError("|delta| must be < 1")
        if self.n_instances < 1 or self.p_max < 0:
            raise ValueError("need n_instances >= 1 and p_max >= 0")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @property
    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(self.x_tolerance, self.f_tolerance, self.max_evaluations,
                               self.initial_simplex_scale, self.restart)

    @property
    def tag(self) -> str:
        if self.algo == "qaoa":
            return f"qaoa_{self.mode}"
        return f"adapt_{self.mode}_{self.pool}_d{self.delta:+g}"

    def instance(self, k: int) -> ProblemInstance:
        return ProblemInstance.generate(self.n_qubits, self.degree, self.base_seed + k, self.f)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def substream_seed(base_seed: int, name: str, *keys: int) -> int:
    """Deterministic child seed for a named random stream."""
    seq = np.random.SeedSequence([base_seed, zlib.crc32(name.encode()), *keys])
    seed = int(seq.generate_state(1, dtype=np.uint64)[0])
    log.debug("substream %s%s of base %d -> %d", name, list(keys), base_seed, seed)
    return seed


def run_instance(config: ExperimentConfig, k: int, keep_selections: bool = False) -> RunRecord:
    instance = config.instance(k)
    pool = build_pool(config.n_qubits, config.pool) if config.algo == "adapt" else None
    return grow_and_optimize(
        instance, pool, config.p_max, delta=config.delta, mode=config.mode,
        optimizer_config=config.optimizer, gamma0=config.gamma0, algo=config.algo,
        instance_id=k, keep_selections=keep_selections,
    )


def _safe_run(args):
    config, k, keep = args
    try:
        return k, run_instance(config, k, keep), None
    except Exception as exc:  # one bad instance must not sink the sweep
        log.exception("instance %d failed", k)
        return k, None, f"{type(exc).__name__}: {exc}"


@dataclass
class AggregateSeries:
    layers: np.ndarray
    n_instances: int
    mean: dict[str, np.ndarray]
    median: dict[str, np.ndarray]

    METRICS = ("norm_error", "ent_middle", "ent_single_avg")

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["layer", "n_instances"]
        for m in self.METRICS:
            header += [f"mean_{m}", f"median_{m}"]
        w.writerow(header)
        for i, layer in enumerate(self.layers):
            row = [int(layer), self.n_instances]
            for m in self.METRICS:
                row += [repr(float(self.mean[m][i])), repr(float(self.median[m][i]))]
            w.writerow(row)
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def aggregate(records) -> AggregateSeries:
    records = list(records)
    if not records:
        raise ValueError("nothing to aggregate")
    depth = min(len(r.rows) for r in records)
    mean, median = {}, {}
    for m in AggregateSeries.METRICS:
        table = np.array([r.column(m)[:depth] for r in records])
        mean[m] = table.mean(axis=0)
        median[m] = np.median(table, axis=0)
    return AggregateSeries(np.arange(depth), len(records), mean, median)


@dataclass
class SweepResult:
    config: ExperimentConfig
    records: list[RunRecord]
    failures: dict[int, str] = field(default_factory=dict)

    @property
    def aggregate(self) -> AggregateSeries:
        return aggregate(self.records)

    def threshold(self, threshold: float = THRESHOLD) -> ThresholdSummary:
        return threshold_summary(self.records, threshold)

    def by_id(self) -> dict[int, RunRecord]:
        return {r.instance_id: r for r in self.records}


def _write_threshold_csv(summaries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ThresholdSummary.CSV_COLUMNS)
        for s in summaries:
            w.writerow([getattr(s, c) if not isinstance(getattr(s, c), float)
                        else repr(getattr(s, c)) for c in ThresholdSummary.CSV_COLUMNS])


def run_sweep(config: ExperimentConfig, keep_selections: bool = False) -> SweepResult:
    """Run every instance of ``config`` and, if ``config.out`` is set, write its files."""
    tasks = [(config, k, keep_selections) for k in range(config.n_instances)]
    if config.jobs > 1:
        with Pool(config.jobs) as pool:
            outcomes = pool.map(_safe_run, tasks)
    else:
        outcomes = [_safe_run(t) for t in tasks]
    result = SweepResult(config, [r for _, r, _ in outcomes if r is not None],
                         {k: err for k, _, err in outcomes if err is not None})
    if result.failures:
        log.warning("%d of %d instances failed", len(result.failures), config.n_instances)
    if config.out:
        _emit_sweep(result, Path(config.out))
    return result


def _emit_sweep(result: SweepResult, out: Path) -> None:
    config = result.config
    (out / "instances").mkdir(parents=True, exist_ok=True)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    for k in range(config.n_instances):
        config.instance(k).save(out / "instances" / f"instance_{k:04d}.json")
    for rec in result.records:
        stem = out / "runs" / f"{config.tag}_{rec.instance_id:04d}"
        write_csv([rec], stem.with_suffix(".csv"))
        program = AnsatzProgram(Reference.ALL_PLUS,
                                tuple(mixer_from_token(t, config.n_qubits) for t in rec.tokens))
        Path(f"{stem}_ansatz.json").write_text(json.dumps(program_to_json(program, rec.params)) + "\n")
    if result.records:
        result.aggregate.to_csv(out / f"aggregate_{config.tag}.csv")
        _write_threshold_csv([result.threshold()], out / f"threshold_{config.tag}.csv")
    (out / f"config_{config.tag}.json").write_text(json.dumps(config.to_json(), indent=2) + "\n")


@dataclass
class DifferenceSeries:
    delta: float
    layers: np.ndarray
    mean: dict[str, np.ndarray]
    median: dict[str, np.ndarray]


def difference_series(records, baseline_records, delta: float) -> DifferenceSeries:
    base = {r.instance_id: r for r in baseline_records}
    pairs = [(r, base[r.instance_id]) for r in records if r.instance_id in base]
    if not pairs:
        raise ValueError("no common instances between the two sweeps")
    depth = min(min(len(a.rows), len(b.rows)) for a, b in pairs)
    mean, median = {}, {}
    for m in AggregateSeries.METRICS:
        diff = np.array([a.column(m)[:depth] - b.column(m)[:depth] for a, b in pairs])
        mean[m] = diff.mean(axis=0)
        median[m] = np.median(diff, axis=0)
    return DifferenceSeries(delta, np.arange(depth), mean, median)


def run_delta_comparison(
    config: ExperimentConfig, deltas, baseline: SweepResult | None = None
) -> tuple[dict[float, DifferenceSeries], dict[float, SweepResult]]:
    """Per-layer mean/median of metric(delta) - metric(0) over seed-locked instances."""
    base_config = config.replace(algo="adapt", delta=0.0, out=None)
    if baseline is None:
        baseline = run_sweep(base_config)
    sweeps = {0.0: baseline}
    for d in deltas:
        d = float(d)
        sweeps[d] = baseline if d == 0.0 else run_sweep(base_config.replace(delta=d))
    series = {d: difference_series(sweeps[d].records, baseline.records, d) for d in map(float, deltas)}
    if config.out:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "delta_differences.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            header = ["delta", "layer"]
            for m in AggregateSeries.METRICS:
                header += [f"mean_diff_{m}", f"median_diff_{m}"]
            w.writerow(header)
            for d, s in series.items():
                for i, layer in enumerate(s.layers):
                    row = [repr(d), int(layer)]
                    for m in AggregateSeries.METRICS:
                        row += [repr(float(s.mean[m][i])), repr(float(s.median[m][i]))]
                    w.writerow(row)
    return series, sweeps


@dataclass
class SpectrumLayer:
    layer: int
    levels_mean: np.ndarray
    levels_std: np.ndarray
    mean_entropy_middle: float
    std_entropy_middle: float  # spread across graph instances
    mean_entropy_single: float
    std_entropy_single: float


@dataclass
class SpectrumStudy:
    adapt: list[SpectrumLayer]
    qaoa: list[SpectrumLayer]
    haar: ent.SpectrumStats


def _combine(layer: int, per_graph: list[ent.SpectrumStats]) -> SpectrumLayer:
    width = max(s.levels_mean.size for s in per_graph)
    levels = np.full((len(per_graph), width), np.nan)
    for i, s in enumerate(per_graph):
        levels[i, : s.levels_mean.size] = s.levels_mean
    middle = np.array([s.mean_entropy_middle for s in per_graph])
    single = np.array([s.mean_entropy_single for s in per_graph])
    return SpectrumLayer(layer, np.nanmean(levels, axis=0), np.nanstd(levels, axis=0),
                         float(middle.mean()), float(middle.std()),
                         float(single.mean()), float(single.std()))


def run_spectrum_study(
    config: ExperimentConfig,
    n_param_samples: int = 1000,
    n_graphs: int = 50,
    adapt_records: dict[int, RunRecord] | None = None,
    haar_samples: int = 10_000,
) -> SpectrumStudy:
    """Random-parameter entanglement statistics per layer for both ansatz families.

    ADAPT ansatze reuse the operator sequence of an optimized run on the same
    graph (only the parameters are randomized); missing runs are computed here.
    """
    n = config.n_qubits
    adapt_cfg = config.replace(algo="adapt", out=None)
    cut = ent.middle_cut(n)
    adapt_layers, qaoa_layers = [], []
    adapt_stats = [[] for _ in range(config.p_max + 1)]
    qaoa_stats = [[] for _ in range(config.p_max + 1)]
    for k in range(n_graphs):
        instance = config.instance(k)
        rec = (adapt_records or {}).get(k) or run_instance(adapt_cfg, k)
        # the evolution Hamiltonian follows the mode, as in the optimized runs
        h = mode_hamiltonian(instance, Mode(config.mode))
        ref = Reference.SYMMETRY_BROKEN if config.mode == "break" else Reference.ALL_PLUS
        tokens = rec.tokens
        for layer in range(config.p_max + 1):
            adapt_prog = AnsatzProgram(ref, tuple(mixer_from_token(t, n) for t in tokens[:layer]))
            qaoa_prog = AnsatzProgram(Reference.ALL_PLUS, (global_x(n),) * layer)
            adapt_stats[layer].append(ent.spectrum_sample(
                adapt_prog, h, n_param_samples,
                substream_seed(config.base_seed, "spectrum-adapt", k, layer), cut))
            qaoa_stats[layer].append(ent.spectrum_sample(
                qaoa_prog, h, n_param_samples,
                substream_seed(config.base_seed, "spectrum-qaoa", k, layer), cut))
    for layer in range(config.p_max + 1):
        adapt_layers.append(_combine(layer, adapt_stats[layer]))
        qaoa_layers.append(_combine(layer, qaoa_stats[layer]))
    haar = ent.haar_baseline(n, cut, haar_samples, substream_seed(config.base_seed, "haar"))
    study = SpectrumStudy(adapt_layers, qaoa_layers, haar)
    if config.out:
        write_spectrum_csvs(study, Path(config.out))
    return study


def write_spectrum_csvs(study: SpectrumStudy, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    haar_layer = SpectrumLayer(-1, study.haar.levels_mean, study.haar.levels_std,
                               study.haar.mean_entropy_middle, study.haar.std_entropy_middle,
                               study.haar.mean_entropy_single, 0.0)
    for name, layers in (("adapt", study.adapt), ("qaoa", study.qaoa), ("haar", [haar_layer])):
        if not layers:
            continue
        with open(out / f"spectrum_{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["layer", "level_index", "mean_xi", "std_xi"])
            for s in layers:
                for i, (m, sd) in enumerate(zip(s.levels_mean, s.levels_std)):
                    w.writerow([s.layer, i, repr(float(m)), repr(float(sd))])
        with open(out / f"spectrum_{name}_summary.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["layer", "mean_ent_middle", "std_ent_middle", "mean_ent_single_avg",
                        "std_ent_single_avg"])
            for s in layers:
                w.writerow([s.layer, repr(s.mean_entropy_middle), repr(s.std_entropy_middle),
                            repr(s.mean_entropy_single), repr(s.std_entropy_single)])


@dataclass
class ScatterResult:
    rows: list[tuple[int, str, float, float]]  # (instance_id, algo, max_ent_middle, final_error)
    spearman: dict[str, float]


def scatter_max_entropy_vs_final_error(records, path=None) -> ScatterResult:
    """Per instance: largest middle-cut entropy over the optimized layers vs the final error."""
    rows = []
    for r in records:
        optimized = r.rows[1:] or r.rows
        rows.append((r.instance_id, r.algo, float(max(x.ent_middle for x in optimized)),
                     float(r.final.norm_error)))
    spearman = {}
    for algo in sorted({row[1] for row in rows}):
        xs = [row[2] for row in rows if row[1] == algo]
        ys = [row[3] for row in rows if row[1] == algo]
        if len(xs) > 2 and np.ptp(xs) > 0 and np.ptp(ys) > 0:
            spearman[algo] = float(stats.spearmanr(xs, ys).statistic)
        else:
            spearman[algo] = float("nan")
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["instance_id", "algo", "max_ent_middle", "final_norm_error"])
            for row in rows:
                w.writerow([row[0], row[1], repr(row[2]), repr(row[3])])
    return ScatterResult(rows, spearman)
