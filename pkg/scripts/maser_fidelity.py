"""Photon-number fidelity and Mandel Q of the pulsed maser for each target."""
import argparse

import numpy as np

from qednonlin.io import write_csv
from qednonlin.maser import maser_scan, pi_pulse_length
from qednonlin.params import DYNAMICS_TRUNCATION, REFERENCE_DEVICE, derive_params
from qednonlin.spectrum import TARGETS, locate_target


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/maser")
    ap.add_argument("--points", type=int, default=81)
    args = ap.parse_args()
    d = derive_params(REFERENCE_DEVICE)
    for name, tg in TARGETS.items():
        ac = locate_target(d, name, t=DYNAMICS_TRUNCATION)
        tau_pi = pi_pulse_length(ac)
        taus = np.linspace(0, 4, args.points) * tau_pi
        scan = maser_scan(d, name, taus, DYNAMICS_TRUNCATION, anticrossing=ac)
        k = tg.photons
        rows = [(p.tau / tau_pi, p.N_c, p.N_p, p.mandel_Q, p.photon_distribution[k]) for p in scan.points]
        write_csv(f"{args.out}/{name}.csv", ["tau[tau_pi]", "N_c[1]", "N_p[1]", "Q_M[1]", f"P_{k}[1]"], rows)
        q = scan.column("mandel_Q")
        j = int(np.nanargmin(q))
        best = maser_scan(d, name, [tau_pi], DYNAMICS_TRUNCATION, anticrossing=ac).points[0]
        print(f"{name}: tau_pi={tau_pi:.4f} ns  P_{k}={best.photon_distribution[k]:.4f}  "
              f"min Q_M={q[j]:.4f} at {taus[j] / tau_pi:.3f} tau_pi")


if __name__ == "__main__":
    main()
