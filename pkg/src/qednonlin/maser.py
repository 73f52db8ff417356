"""Pulsed Fock-state maser: prepare |1,0> at N_g = 0, jump onto an anticrossing
for a time tau, jump back, read out the field."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lindblad import DensityMatrix, PulseSchedule, evolve, mandel_q, mean_charge, mean_photons, photon_distribution
from .errors import SearchFailure, UndefinedValueError
from .operators import JOSEPHSON_HALF
from .params import DYNAMICS_TRUNCATION, DerivedParams, Truncation
from .spectrum import TARGETS, Anticrossing, locate_target


@dataclass(frozen=True)
class MaserPoint:
    tau: float
    N_c: float
    N_p: float
    mandel_Q: float
    photon_distribution: np.ndarray
    trace_defect: float


@dataclass(frozen=True)
class MaserScan:
    target: str
    anticrossing: Anticrossing
    tau_pi: float
    points: list

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


CLOSED_GAP = 1e-9  # rad/ns; below this the exchange period exceeds 1e9 ns


def pi_pulse_length(ac: Anticrossing) -> float:
    if ac.gap < CLOSED_GAP:
        raise SearchFailure(f"levels {ac.level_pair} cross (gap {ac.gap:.3g} rad/ns); no exchange pulse exists")
    return math.pi / ac.gap


def maser_schedule(Ng_target: float, tau: float) -> PulseSchedule:
    return PulseSchedule(((tau, Ng_target), (0.0, 0.0)), description=f"maser tau={tau:g}")


def _point(tau, rho, trunc) -> MaserPoint:
    try:
        q = mandel_q(rho, trunc)
    except UndefinedValueError:
        q = math.nan
    return MaserPoint(
        float(tau),
        mean_charge(rho, trunc),
        mean_photons(rho, trunc),
        q,
        photon_distribution(rho, trunc),
        abs(complex(np.trace(np.asarray(rho))) - 1.0),
    )


def maser_scan(
    d: DerivedParams,
    target: str,
    tau_grid,
    trunc: Truncation = DYNAMICS_TRUNCATION,
    anticrossing: Anticrossing | None = None,
    josephson: float = JOSEPHSON_HALF,
) -> MaserScan:
    """Observables right after the return to N_g = 0, for every pulse length in ``tau_grid``.

    Ramps are instantaneous, so a single evolution at the anticrossing bias
    sampled at each tau gives the whole scan.
    """
    tg = TARGETS[target]
    ac = anticrossing or locate_target(d, tg, t=trunc, josephson=josephson)
    taus = np.asarray(tau_grid, dtype=float)
    if np.any(taus < 0):
        raise ValueError("tau must be non-negative")
    order = np.argsort(taus, kind="stable")
    rho0 = DensityMatrix.basis(trunc, 1, 0)
    states = {}
    last, rho = 0.0, np.asarray(rho0)
    for k in order:
        tau = float(taus[k])
        if tau > last:
            _, final = evolve(
                rho, PulseSchedule(((tau - last, ac.location_Ng),)), d, trunc,
                josephson=josephson, theta_ex=tg.theta_ex,
            )
            rho, last = np.asarray(final), tau
        states[k] = rho
    points = [_point(taus[k], states[k], trunc) for k in range(taus.size)]
    return MaserScan(target, ac, pi_pulse_length(ac), points)


def maser_protocol(
    d: DerivedParams,
    target: str,
    tau: float,
    trunc: Truncation = DYNAMICS_TRUNCATION,
    anticrossing: Anticrossing | None = None,
    josephson: float = JOSEPHSON_HALF,
) -> MaserPoint:
    """Single pulse of length ``tau``; returns (N_c, N_p, Q_M, P_n) after the ramp back."""
    tg = TARGETS[target]
    ac = anticrossing or locate_target(d, tg, t=trunc, josephson=josephson)
    _, final = evolve(
        DensityMatrix.basis(trunc, 1, 0), maser_schedule(ac.location_Ng, tau), d, trunc,
        josephson=josephson, theta_ex=tg.theta_ex,
    )
    return _point(tau, final, trunc)
