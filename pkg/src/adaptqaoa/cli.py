"""Command-line entry point: ``adaptqaoa {sweep,delta,spectrum,scatter,baseline}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import entanglement as ent
from .harness import (
    FULL_SCALE_INSTANCES, ExperimentConfig, SpectrumStudy, run_delta_comparison, run_spectrum_study,
    run_sweep, scatter_max_entropy_vs_final_error, substream_seed, write_spectrum_csvs,
)
from .records import read_csv

log = logging.getLogger("adaptqaoa")

# flag dest -> ExperimentConfig field
_FLAG_FIELDS = {
    "qubits": "n_qubits", "degree": "degree", "instances": "n_instances", "seed": "base_seed",
    "algo": "algo", "mode": "mode", "pool": "pool", "delta": "delta", "f": "f",
    "gamma0": "gamma0", "layers": "p_max", "out": "out", "jobs": "jobs",
    "max_evals": "max_evaluations", "restart": "restart",
}


def _experiment_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment")
    g.add_argument("--qubits", type=int, help="number of qubits / graph vertices (default 6)")
    g.add_argument("--degree", type=int, help="regular-graph degree (default n-1, complete graph)")
    g.add_argument("--instances", type=int, help="number of seeded instances (default 50)")
    g.add_argument("--full-scale", action="store_true", help=f"use {FULL_SCALE_INSTANCES} instances")
    g.add_argument("--seed", type=int, help="base seed; instance k uses seed + k")
    g.add_argument("--algo", choices=("adapt", "qaoa"))
    g.add_argument("--mode", choices=("preserve", "break"))
    g.add_argument("--pool", choices=("full", "ladder", "linear"))
    g.add_argument("--delta", type=float, help="two-qubit gradient penalty, |delta| < 1")
    g.add_argument("--f", type=float, help="symmetry-breaking field strength (break mode)")
    g.add_argument("--gamma0", type=float)
    g.add_argument("--layers", type=int, help="maximum layer count p")
    g.add_argument("--max-evals", type=int, help="Nelder-Mead evaluation cap per layer")
    g.add_argument("--restart", action="store_true", default=None,
                   help="restart Nelder-Mead once from its optimum")
    g.add_argument("--out", help="output directory")
    g.add_argument("--jobs", type=int, help="worker processes")
    g.add_argument("--config", type=Path, help="JSON config; its keys override flags")


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {field: getattr(args, flag) for flag, field in _FLAG_FIELDS.items()
              if getattr(args, flag, None) is not None}
    if getattr(args, "full_scale", False):
        values["n_instances"] = FULL_SCALE_INSTANCES
    if getattr(args, "config", None):
        values.update(json.loads(args.config.read_text()))
    return ExperimentConfig.from_json(values)


def _report_failures(failures: dict[int, str], total: int) -> int:
    if not failures:
        return 0
    print(f"{len(failures)} of {total} instances failed:", file=sys.stderr)
    for k, err in sorted(failures.items()):
        print(f"  instance {k}: {err}", file=sys.stderr)
    return 2


def cmd_sweep(args) -> int:
    config = build_config(args)
    result = run_sweep(config)
    agg = result.aggregate if result.records else None
    if agg is not None:
        print(f"{config.tag}: {len(result.records)} runs, layer {agg.layers[-1]} "
              f"mean error {agg.mean['norm_error'][-1]:.4g}, "
              f"median middle entropy {agg.median['ent_middle'][-1]:.4g}")
        thr = result.threshold()
        print(f"threshold: {thr.n_included} reached, mean CNOTs {thr.mean_cnot:.4g}, "
              f"mean params {thr.mean_params:.4g}")
    return _report_failures(result.failures, config.n_instances)


def cmd_delta(args) -> int:
    config = build_config(args)
    series, sweeps = run_delta_comparison(config, args.deltas)
    for d, s in series.items():
        print(f"delta {d:+g}: final mean error difference {s.mean['norm_error'][-1]:+.4g}")
    failures = {k: e for sw in sweeps.values() for k, e in sw.failures.items()}
    return _report_failures(failures, config.n_instances)


def cmd_spectrum(args) -> int:
    config = build_config(args)
    study = run_spectrum_study(config, args.samples, args.graphs, haar_samples=args.haar_samples)
    print(f"haar mean middle entropy {study.haar.mean_entropy_middle:.4f}")
    for a, q in zip(study.adapt, study.qaoa):
        print(f"layer {a.layer:2d}: adapt {a.mean_entropy_middle:.4f}  qaoa {q.mean_entropy_middle:.4f}")
    return 0


def cmd_scatter(args) -> int:
    records = []
    for path in args.runs:
        path = Path(path)
        files = sorted(path.glob("runs/*.csv")) if path.is_dir() else [path]
        for f in files:
            records.extend(read_csv(f))
    if not records:
        print("no run CSVs found", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    result = scatter_max_entropy_vs_final_error(records, out)
    for algo, rho in result.spearman.items():
        print(f"{algo}: spearman {rho:+.4f} over {sum(r[1] == algo for r in result.rows)} runs")
    return 0


def cmd_baseline(args) -> int:
    n = args.qubits
    cut = ent.middle_cut(n)
    seed = substream_seed(args.seed, "haar")
    log.info("haar substream seed %d", seed)
    stats = ent.haar_baseline(n, cut, args.samples, seed)
    page = ent.page_entropy(2 ** len(cut.subsystem_a), 2 ** len(cut.subsystem_b))
    print(f"haar mean middle entropy {stats.mean_entropy_middle:.5f} "
          f"(std {stats.std_entropy_middle:.5f}); page value {page:.5f}")
    if args.out:
        write_spectrum_csvs(SpectrumStudy([], [], stats), Path(args.out))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptqaoa", description="ADAPT-QAOA vs QAOA Max-Cut experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="optimize every instance layer by layer")
    _experiment_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("delta", help="seed-locked penalty comparison against delta = 0")
    _experiment_flags(p)
    p.add_argument("--deltas", type=float, nargs="+", default=[-0.5, -0.1, 0.1, 0.5])
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("spectrum", help="random-parameter entanglement spectrum per layer")
    _experiment_flags(p)
    p.add_argument("--samples", type=int, default=1000, help="parameter samples per graph and layer")
    p.add_argument("--graphs", type=int, default=50)
    p.add_argument("--haar-samples", type=int, default=10_000)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scatter", help="max entropy vs final error from run CSVs")
    p.add_argument("runs", nargs="+", help="sweep output directories or run CSV files")
    p.add_argument("--out", default="scatter.csv")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("baseline", help="Haar random-state entropy baseline")
    p.add_argument("--qubits", type=int, default=6)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
