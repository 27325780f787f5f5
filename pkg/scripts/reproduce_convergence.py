"""ADAPT-QAOA vs standard QAOA: per-layer error/entropy, threshold resources, scatter.

    python scripts/reproduce_convergence.py --out results/convergence [--instances 512] [--mode break]
"""

import argparse
import logging

from adaptqaoa.harness import ExperimentConfig, run_sweep, scatter_max_entropy_vs_final_error


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--qubits", type=int, default=6)
    ap.add_argument("--instances", type=int, default=50)
    ap.add_argument("--mode", choices=("preserve", "break"), default="preserve")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/convergence")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO)

    base = ExperimentConfig(n_qubits=args.qubits, n_instances=args.instances, mode=args.mode,
                            base_seed=args.seed, jobs=args.jobs)
    sweeps = {algo: run_sweep(base.replace(algo=algo, out=f"{args.out}/{algo}"))
              for algo in ("adapt", "qaoa")}
    p = base.p_max
    for algo, sw in sweeps.items():
        agg, thr = sw.aggregate, sw.threshold()
        print(f"{algo:5s} layer {p}: mean error {agg.mean['norm_error'][p]:.4f}  "
              f"median error {agg.median['norm_error'][p]:.4f}  "
              f"median middle entropy {agg.median['ent_middle'][p]:.3f}")
        print(f"      threshold reached {thr.n_included}/{len(sw.records)}, "
              f"CNOTs {thr.mean_cnot:.1f} +- {thr.std_cnot:.1f}, params {thr.mean_params:.2f}")
    records = [r for sw in sweeps.values() for r in sw.records]
    sc = scatter_max_entropy_vs_final_error(records, f"{args.out}/scatter.csv")
    print("spearman(max entropy, final error):", {k: round(v, 3) for k, v in sc.spearman.items()})


if __name__ == "__main__":
    main()
