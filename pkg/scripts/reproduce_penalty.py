"""Two-qubit gradient penalty: error and entropy differences against delta = 0.

    python scripts/reproduce_penalty.py --instances 30 --out results/penalty
"""

import argparse

from adaptqaoa.harness import ExperimentConfig, run_delta_comparison


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--instances", type=int, default=30)
    ap.add_argument("--deltas", type=float, nargs="+", default=[-0.5, -0.1, 0.1, 0.5])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="results/penalty")
    args = ap.parse_args()

    config = ExperimentConfig(n_qubits=6, n_instances=args.instances, base_seed=args.seed,
                              jobs=args.jobs, out=args.out)
    series, sweeps = run_delta_comparison(config, args.deltas)
    print("delta   final mean error   mean error difference by layer 1..5")
    for d in args.deltas:
        s = series[d]
        print(f"{d:+.2f}   {sweeps[d].aggregate.mean['norm_error'][-1]:.4f}             "
              + " ".join(f"{x:+.4f}" for x in s.mean["norm_error"][1:6]))


if __name__ == "__main__":
    main()
