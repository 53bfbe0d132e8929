"""Postselection retention versus two-qubit error rate, plus trajectory/density-matrix agreement."""

import argparse
import csv

import numpy as np

from espnor.config import NoiseSpec, OptimizerConfig, RunConfig
from espnor.estimators import postselect
from espnor.fermion import sector_mask
from espnor.model_io import load_instance
from espnor.noise import density_matrix_probabilities, simulate_noisy
from espnor.pipeline import prepare_pipeline
from espnor.statevector import total_variation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instance", default="data/synthetic_4e4o.json")
    ap.add_argument("--p1", type=float, default=3e-4)
    ap.add_argument("--p2-grid", default="0,0.005,0.01,0.015,0.02,0.03")
    ap.add_argument("--trajectories", type=int, default=40_000)
    ap.add_argument("--tv-trajectories", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="retention.csv")
    args = ap.parse_args()
    inst = load_instance(args.instance)
    prep = prepare_pipeline(inst, RunConfig(optimizer=OptimizerConfig(restarts=2)))
    print("native gates", prep.native.gate_counts())
    with open(args.out, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["p2", "retention_trajectory", "retention_density_matrix", "tv_trajectory_vs_dm"])
        for k, p2 in enumerate(float(x) for x in args.p2_grid.split(",")):
            noise = NoiseSpec(args.p1, p2)
            counts = simulate_noisy(prep.native, noise, args.trajectories, args.seed + k)
            ret = postselect(counts, prep.layout, inst.n_alpha, inst.n_beta).retention_fraction
            dm = density_matrix_probabilities(prep.native, noise)
            ret_dm = float(dm[sector_mask(prep.layout, inst.n_alpha, inst.n_beta)].sum())
            big = simulate_noisy(prep.native, noise, args.tv_trajectories, 1000 + args.seed + k)
            tv = total_variation(big.frequencies(), dm)
            row = [p2, ret, ret_dm, tv]
            wr.writerow(row)
            print(*np.round(row, 4))


if __name__ == "__main__":
    main()
