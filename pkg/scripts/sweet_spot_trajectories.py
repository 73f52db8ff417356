"""Quantum-jump trajectories at the charge sweet spot: jump census and parity."""
import argparse

import numpy as np

from qednonlin.mcwf import classify_jumps, run_trajectory
from qednonlin.operators import basis_state, build_hamiltonian, standard_channels
from qednonlin.params import REFERENCE_DEVICE, Truncation, derive_params


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-traj", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t-end-kappa", type=float, default=5.0, help="run length in units of 1/kappa")
    args = ap.parse_args()
    d = derive_params(REFERENCE_DEVICE)
    t = Truncation(1, 20)
    H = build_hamiltonian(d, None, 0.5, t, theta_ex=0.0)
    ch = standard_channels(d, t)
    totals: dict[str, int] = {}
    ups = 0
    for seed in range(args.seed, args.seed + args.n_traj):
        rec = run_trajectory(H, ch, basis_state(t, 0, 0), args.t_end_kappa / d.kappa, 0.02, seed, t)
        s = classify_jumps(rec)
        for k, v in s.counts.items():
            totals[k] = totals.get(k, 0) + v
        ups += sum(1 for e in rec.jumps if e.channel == "qubit_decay" and e.delta_Np > 0.5)
        w = rec.parity_weight_series
        print(f"seed {seed}: {len(rec.jumps)} jumps, <N_p>={rec.N_p_series.mean():.3f}, "
              f"parity deviation {np.max(np.minimum(w, 1 - w)):.1e}")
    print("jump totals:", totals, f"| qubit-decay jumps raising N_p by > 0.5: {ups}")


if __name__ == "__main__":
    main()
