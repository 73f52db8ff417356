"""Steady-state charge and photon number over the (N_g, theta_ex) grid."""
import argparse
import math
import time

import numpy as np

from qednonlin.io import write_csv
from qednonlin.lindblad import sweep_steady
from qednonlin.params import REFERENCE_DEVICE, Truncation, derive_params


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/steady_map.csv")
    ap.add_argument("--n-ng", type=int, default=26)
    ap.add_argument("--n-theta", type=int, default=11)
    ap.add_argument("--n-p-max", type=int, default=20)
    args = ap.parse_args()
    d = derive_params(REFERENCE_DEVICE)
    ng = np.linspace(0, 0.5, args.n_ng)
    th = np.linspace(0, math.pi / 2, args.n_theta)
    t0 = time.perf_counter()
    g = sweep_steady(d, ng, th, Truncation(1, args.n_p_max))
    rows = [(ng[j], th[i], g.N_c[i, j], g.N_p[i, j]) for i in range(th.size) for j in range(ng.size)]
    write_csv(args.out, ["N_g[1]", "theta_ex[rad]", "N_c[1]", "N_p[1]"], rows)
    i, j = np.unravel_index(np.nanargmax(g.N_p), g.N_p.shape)
    print(f"{ng.size}x{th.size} grid in {time.perf_counter() - t0:.0f} s; "
          f"max N_p={g.N_p[i, j]:.3f} at N_g={ng[j]:.2f}, theta_ex={th[i]:.3f}; failures: {len(g.errors)}")


if __name__ == "__main__":
    main()
