"""Full vs ladder vs linear operator pools on the same seeded instances.

    python scripts/reproduce_pools.py --out results/pools
"""

import argparse

from adaptqaoa.harness import ExperimentConfig, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--instances", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/pools")
    args = ap.parse_args()

    base = ExperimentConfig(n_qubits=6, n_instances=args.instances, base_seed=args.seed, jobs=args.jobs)
    print("pool    final mean error  mean middle entropy (layers 1-5)")
    for pool in ("full", "ladder", "linear"):
        agg = run_sweep(base.replace(pool=pool, out=f"{args.out}/{pool}")).aggregate
        early = agg.mean["ent_middle"][1:6]
        print(f"{pool:7s} {agg.mean['norm_error'][-1]:.4f}            {' '.join(f'{x:.3f}' for x in early)}")


if __name__ == "__main__":
    main()
