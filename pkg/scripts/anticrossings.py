"""Locate the three target anticrossings and compare against the two-level estimate."""
import math

from qednonlin.params import REFERENCE_DEVICE, SPECTRUM_TRUNCATION, derive_params
from qednonlin.spectrum import TARGETS, locate_target, resonance_estimate


def main():
    d = derive_params(REFERENCE_DEVICE)
    print(f"E_C/E_J = {d.E_C_over_hbar / d.E_J_over_hbar:.2f}, theta_L = {d.theta_L:.4f}")
    print("target  theta_ex  N_g(bare)  N_g       gap/E_J  two-level")
    for name, tg in TARGETS.items():
        ac = locate_target(d, name, t=SPECTRUM_TRUNCATION)
        k = tg.photons
        est = math.exp(-d.theta_L**2 / 2) * d.theta_L**k / math.sqrt(math.factorial(k))
        print(f"{name:6}  {tg.theta_ex:8.4f}  {resonance_estimate(d, k):.5f}    {ac.location_Ng:.5f}   "
              f"{ac.gap / d.E_J_over_hbar:.4f}   {est:.4f}")


if __name__ == "__main__":
    main()
