"""Adiabatic-elimination model of two-photon squeezing.

The qubit is driven at twice the resonator frequency by modulating the gate
charge; it relaxes much faster than the field and is replaced by its quasi
steady state, which in turn pumps the field parametrically. Both reductions
are small ODE systems, integrated either with the fast phases kept explicitly
("full") or after the rotating-wave approximation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InstabilityError, InvalidParameterError
from .params import TWO_PI, DerivedParams

DEFAULT_OMEGA = TWO_PI * 0.5  # rad/ns; only Omega << omega0 is required
STEPS_PER_PERIOD = 50


@dataclass(frozen=True)
class DriveParams:
    Omega: float
    omega0: float
    E_J_over_hbar: float
    theta_L: float
    gamma_minus: float
    gamma_phi: float
    kappa: float

    def __post_init__(self):
        for name in ("Omega", "gamma_minus", "gamma_phi", "kappa"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be non-negative")
        if self.omega0 <= 0:
            raise InvalidParameterError("omega0 must be positive")

    @classmethod
    def from_derived(cls, d: DerivedParams, Omega: float = DEFAULT_OMEGA, **overrides) -> "DriveParams":
        kw = dict(
            Omega=Omega,
            omega0=d.omega0,
            E_J_over_hbar=d.E_J_over_hbar,
            theta_L=d.theta_L,
            gamma_minus=d.gamma_minus,
            gamma_phi=d.gamma_phi,
            kappa=d.kappa,
        )
        kw.update(overrides)
        return cls(**kw)

    @property
    def drive_coupling(self) -> float:
        """(Omega / 2 w0) (E_J / 4): effective two-level Rabi coupling after the RWA."""
        return self.Omega / (2.0 * self.omega0) * self.E_J_over_hbar / 4.0

    def with_(self, **kw) -> "DriveParams":
        return replace(self, **kw)


def gate_modulation_depth(Omega: float, E_C: float) -> float:
    """Gate-charge modulation amplitude Delta N_g for a drive Omega."""
    return Omega / (2.0 * E_C)


@dataclass(frozen=True)
class ReducedQubitState:
    rho11: float
    rho10_tilde: complex


@dataclass(frozen=True)
class FieldMoments:
    A_tilde: complex
    B_tilde: complex
    N_p: float

    @property
    def sane(self) -> bool:
        return self.N_p >= 0 and abs(self.B_tilde) <= self.N_p + 1.0


VACUUM = FieldMoments(0j, 0j, 0.0)


@dataclass(frozen=True)
class QubitSeries:
    times: np.ndarray
    rho11: np.ndarray
    rho10_tilde: np.ndarray

    @property
    def final(self) -> ReducedQubitState:
        return ReducedQubitState(float(self.rho11[-1]), complex(self.rho10_tilde[-1]))


@dataclass(frozen=True)
class FieldSeries:
    times: np.ndarray
    A_tilde: np.ndarray
    B_tilde: np.ndarray
    N_p: np.ndarray

    @property
    def final(self) -> FieldMoments:
        return FieldMoments(complex(self.A_tilde[-1]), complex(self.B_tilde[-1]), float(self.N_p[-1]))


# ---------------------------------------------------------------- closed forms


def lambda_ss(p: DriveParams) -> float:
    """Steady-state coherence parameter: rho10~ = -i lambda (see ``qubit_ss``)."""
    g = p.drive_coupling
    den = p.gamma_minus * (p.gamma_minus / 2.0 + p.gamma_phi) + 4.0 * g * g
    if not den > 0:
        raise InvalidParameterError("lambda undefined: no decay and no drive")
    return p.gamma_minus * g / den


def qubit_ss(p: DriveParams) -> ReducedQubitState:
    """Fixed point of the RWA qubit equations: rho11 = 2 g lambda / gamma_-, rho10~ = -i lambda."""
    lam = lambda_ss(p)
    return ReducedQubitState(2.0 * p.drive_coupling * lam / p.gamma_minus, complex(0.0, -lam))


def optimal_coupling(gamma_minus: float, gamma_phi: float) -> float:
    """Drive coupling maximizing lambda: 4 g^2 = gamma_-(gamma_-/2 + gamma_phi)."""
    return 0.5 * math.sqrt(gamma_minus * (gamma_minus / 2.0 + gamma_phi))


def mu_of(lam: float, theta_L: float, E_J: float, kappa: float) -> float:
    """Parametric gain relative to loss, lambda theta_L^2 E_J / kappa."""
    return lam * theta_L**2 * E_J / kappa


def _check_mu(mu: float) -> None:
    if mu < 0:
        raise InvalidParameterError(f"mu must be non-negative, got {mu}")
    if mu >= 1.0:
        raise InstabilityError(f"mu={mu:.6g} >= 1: parametric instability, no steady state")


def field_ss(mu: float) -> FieldMoments:
    _check_mu(mu)
    s = 1.0 - mu * mu
    return FieldMoments(0j, complex(-0.5 * mu / s), 0.5 * mu * mu / s)


def quadrature_ss(mu: float) -> tuple[float, float]:
    _check_mu(mu)
    return 0.5 / math.sqrt(1.0 + mu), 0.5 / math.sqrt(1.0 - mu)


def quadratures_from_moments(m: FieldMoments) -> tuple[float, float]:
    """Rotating-frame quadrature deviations from (<a>, <aa>, <a^dag a>)."""
    a, b, n = m.A_tilde, m.B_tilde, m.N_p
    v1 = 0.25 * (1.0 + 2.0 * n + 2.0 * b.real) - a.real**2
    v2 = 0.25 * (1.0 + 2.0 * n - 2.0 * b.real) - a.imag**2
    return math.sqrt(max(v1, 0.0)), math.sqrt(max(v2, 0.0))


def mu_max(n_p_max_physical: float) -> float:
    """Largest mu keeping the steady photon number below the charge-qubit limit."""
    if not n_p_max_physical > 0:
        raise InvalidParameterError("n_p_max_physical must be positive")
    n2 = 2.0 * n_p_max_physical
    return math.sqrt(n2 / (1.0 + n2))


def required_kappa_for(mu_target: float, lam: float, theta_L: float, E_J: float, omega0: float | None = None):
    """Resonator loss giving ``mu_target``; returns ``(kappa, Q)`` (Q is None without omega0)."""
    if not 0.0 < mu_target < 1.0:
        raise InvalidParameterError("mu_target must lie in (0, 1)")
    if lam == 0 or theta_L == 0 or E_J == 0:
        raise InvalidParameterError("no parametric coupling (lambda, theta_L or E_J is zero)")
    kappa = lam * theta_L**2 * E_J / mu_target
    return kappa, (omega0 / kappa if omega0 else None)


# ---------------------------------------------------------------- qubit ODEs


def _solve(rhs, y0, t_end, n_out, rtol=1e-12, atol=1e-13):
    t_eval = np.linspace(0.0, t_end, n_out)
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise InstabilityError(sol.message)
    return sol.t, sol.y


def integrate_qubit_rwa(p: DriveParams, state0: ReducedQubitState, t_end: float, n_out: int = 401) -> QubitSeries:
    g = p.drive_coupling
    gm, gp = p.gamma_minus, p.gamma_phi

    def rhs(_t, y):
        r11, r10 = y
        return [
            -gm * r11 - 1j * g * (np.conj(r10) - r10),
            (-gm / 2.0 - gp) * r10 - 1j * g * (1.0 - 2.0 * r11),
        ]

    t, y = _solve(rhs, np.array([state0.rho11, state0.rho10_tilde], dtype=complex), t_end, n_out)
    return QubitSeries(t, y[0].real, y[1])


def _rk4_fixed(f, y, t_end, h_max, record_every=1):
    """Classical RK4 on Python complex scalars (cheap for a handful of unknowns)."""
    n = max(1, math.ceil(t_end / h_max))
    h = t_end / n
    ts, ys = [0.0], [tuple(y)]
    t = 0.0
    for k in range(1, n + 1):
        k1 = f(t, y)
        y2 = [a + 0.5 * h * b for a, b in zip(y, k1)]
        k2 = f(t + 0.5 * h, y2)
        y3 = [a + 0.5 * h * b for a, b in zip(y, k2)]
        k3 = f(t + 0.5 * h, y3)
        y4 = [a + h * b for a, b in zip(y, k3)]
        k4 = f(t + h, y4)
        y = [a + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]
        t = k * h
        if k % record_every == 0 or k == n:
            ts.append(t)
            ys.append(tuple(y))
    return np.array(ts), np.array(ys, dtype=complex)


def _fast_step(p: DriveParams, steps_per_period: int) -> float:
    return (TWO_PI / (2.0 * p.omega0)) / steps_per_period


def qubit_phase(p: DriveParams, t):
    """Fast phase separating rho10 from its slowly varying envelope."""
    w2 = 2.0 * p.omega0
    return w2 * t + p.Omega / w2 * np.sin(w2 * t)


def integrate_qubit_full(
    p: DriveParams,
    state0: ReducedQubitState,
    t_end: float,
    steps_per_period: int = STEPS_PER_PERIOD,
    record_every: int = 1,
) -> QubitSeries:
    """Qubit Bloch equations with the 2 w0 phase and its modulation kept explicitly."""
    gm, gp, w0, Om = p.gamma_minus, p.gamma_phi, p.omega0, p.Omega
    half_ej = p.E_J_over_hbar / 2.0
    w2 = 2.0 * w0
    decay = -gm / 2.0 - gp
    cos = math.cos

    def f(t, y):
        r11, r10 = y
        return (
            -gm * r11 + 1j * half_ej * (r10.conjugate() - r10),
            (decay - 1j * (w2 + Om * cos(w2 * t))) * r10 + 1j * half_ej * (1.0 - 2.0 * r11),
        )

    y0 = [complex(state0.rho11), complex(state0.rho10_tilde)]
    ts, ys = _rk4_fixed(f, y0, t_end, _fast_step(p, steps_per_period), record_every)
    tilde = ys[:, 1] * np.exp(1j * qubit_phase(p, ts))
    return QubitSeries(ts, ys[:, 0].real, tilde)


# ---------------------------------------------------------------- field ODEs


def _field_coupling(p: DriveParams, lam: float) -> float:
    return lam * p.theta_L**2 * p.E_J_over_hbar


def integrate_field_rwa(p: DriveParams, m0: FieldMoments, lam: float, t_end: float, n_out: int = 401) -> FieldSeries:
    c = _field_coupling(p, lam)
    k = p.kappa
    mu = c / k if k > 0 else math.inf
    if c > 0 and mu >= 1.0:
        raise InstabilityError(f"mu={mu:.6g} >= 1: parametric instability")

    def rhs(_t, y):
        a, b, n = y
        return [
            -0.5 * k * a - 0.5 * c * np.conj(a),
            -k * b - 0.5 * c * (2.0 * n + 1.0),
            -k * n - 0.5 * c * (np.conj(b) + b),
        ]

    y0 = np.array([m0.A_tilde, m0.B_tilde, m0.N_p], dtype=complex)
    t, y = _solve(rhs, y0, t_end, n_out)
    return FieldSeries(t, y[0], y[1], y[2].real)


def field_phase_B(p: DriveParams, lam: float, t):
    c = _field_coupling(p, lam)
    w0 = p.omega0
    return 2.0 * w0 * t + c / w0 * np.cos(2.0 * w0 * t)


def integrate_field_full(
    p: DriveParams,
    m0: FieldMoments,
    lam: float,
    t_end: float,
    steps_per_period: int = STEPS_PER_PERIOD,
    record_every: int = 1,
) -> FieldSeries:
    """Field moments with the explicit sin(2 w0 t) parametric modulation.

    ``m0`` holds lab-frame values at t = 0; the returned series is transformed
    back to the slowly varying frame used by the RWA equations.
    """
    if not 0.0 <= lam <= 0.5:
        raise InvalidParameterError("lambda must lie in [0, 1/2]")
    c = _field_coupling(p, lam)
    k, w0 = p.kappa, p.omega0
    w2 = 2.0 * w0
    sin = math.sin

    def f(t, y):
        a, b, n = y
        s = c * sin(w2 * t)
        return (
            (-0.5 * k - 1j * w0) * a + 1j * s * (a.conjugate() + a),
            (-k - 1j * w2 + 2j * s) * b + 1j * s * (2.0 * n + 1.0),
            -k * n + 1j * s * (b.conjugate() - b),
        )

    # phases vanish at t = 0 except the B offset c/w0 * cos(0)
    b0 = m0.B_tilde * np.exp(-1j * c / w0)
    y0 = [complex(m0.A_tilde), complex(b0), complex(m0.N_p)]
    ts, ys = _rk4_fixed(f, y0, t_end, _fast_step(p, steps_per_period), record_every)
    a_t = ys[:, 0] * np.exp(1j * w0 * ts)
    b_t = ys[:, 1] * np.exp(1j * field_phase_B(p, lam, ts))
    return FieldSeries(ts, a_t, b_t, ys[:, 2].real)


def cycle_average(times: np.ndarray, values: np.ndarray, period: float, n_periods: int = 20) -> float:
    """Mean over the last ``n_periods`` whole periods (trapezoidal)."""
    t_hi = times[-1]
    t_lo = t_hi - n_periods * period
    if t_lo < times[0]:
        raise ValueError("series shorter than the averaging window")
    m = times >= t_lo - 1e-12
    return float(np.trapezoid(np.asarray(values)[m], times[m]) / (times[m][-1] - times[m][0]))


def drive_period(p: DriveParams) -> float:
    return TWO_PI / (2.0 * p.omega0)
