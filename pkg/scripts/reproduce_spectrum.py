"""Random-parameter entanglement spectrum per layer for ADAPT-QAOA and QAOA, with the Haar baseline.

    python scripts/reproduce_spectrum.py --graphs 50 --samples 1000 --out results/spectrum
"""

import argparse

from adaptqaoa.harness import ExperimentConfig, run_spectrum_study


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--graphs", type=int, default=10)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--haar-samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/spectrum")
    args = ap.parse_args()

    config = ExperimentConfig(n_qubits=6, n_instances=args.graphs, base_seed=args.seed, out=args.out)
    study = run_spectrum_study(config, args.samples, args.graphs, haar_samples=args.haar_samples)
    haar = study.haar.mean_entropy_middle
    print(f"haar middle-cut entropy {haar:.4f}")
    print("layer  adapt            qaoa")
    for a, q in zip(study.adapt, study.qaoa):
        print(f"{a.layer:5d}  {a.mean_entropy_middle:.4f} ({a.mean_entropy_middle / haar:5.1%})  "
              f"{q.mean_entropy_middle:.4f} ({q.mean_entropy_middle / haar:5.1%})")


if __name__ == "__main__":
    main()
