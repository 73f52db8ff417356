"""Closed-form squeezing numbers and an RWA validity scan of the qubit reduction."""
import numpy as np

from qednonlin import squeezing as sq
from qednonlin.params import TWO_PI, PhysicalParams, derive_params


def rwa_error(d, ratio):
    p = sq.DriveParams.from_derived(d, Omega=ratio * 2 * d.omega0)
    s = sq.integrate_qubit_full(p, sq.ReducedQubitState(0.0, 0j), 20.0 / p.gamma_minus)
    per = sq.drive_period(p)
    ss = sq.qubit_ss(p)
    e11 = sq.cycle_average(s.times, s.rho11, per) / ss.rho11 - 1
    elam = sq.cycle_average(s.times, s.rho10_tilde.imag, per) / ss.rho10_tilde.imag - 1
    return e11, elam


def main():
    d = derive_params(PhysicalParams(xi=0.01))
    p = sq.DriveParams.from_derived(d)
    lam = sq.lambda_ss(p)
    mu = sq.mu_max(8)
    kappa, Q = sq.required_kappa_for(mu, lam, d.theta_L, d.E_J_over_hbar, d.omega0)
    dx1, dx2 = sq.quadrature_ss(mu)
    print(f"lambda={lam:.4f}  mu_max(8)={mu:.4f}  dX1={dx1:.4f}  dX2={dx2:.4f}")
    print(f"xi=0.01: kappa/2pi={kappa / TWO_PI * 1e3:.3f} MHz, Q={Q:.3g}")
    print("Omega/2w0   E_J/2pi[GHz]   rho11 err   lambda err")
    for ej in (10.0, 1.0):
        dd = d.with_(E_J_over_hbar=TWO_PI * ej)
        for r in np.geomspace(0.002, 0.02, 4):
            e11, elam = rwa_error(dd, r)
            print(f"{r:9.4f}   {ej:12.1f}   {e11:+9.3f}   {elam:+9.3f}")


if __name__ == "__main__":
    main()
