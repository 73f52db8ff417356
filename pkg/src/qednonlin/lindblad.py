"""Master-equation dynamics: Liouvillian assembly, pulsed evolution, steady states.

Vectorization is column stacking, ``vec(rho)[i + n*j] = rho[i, j]``, so that
``vec(A rho B) = (B.T kron A) vec(rho)``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from .errors import DimensionError, InvalidParameterError, NonUniqueSteadyState, StiffnessError, UndefinedValueError
from .operators import (
    JOSEPHSON_HALF,
    basis_state,
    build_field_ops,
    build_hamiltonian,
    standard_channels,
)
from .params import DYNAMICS_TRUNCATION, DerivedParams, Truncation

log = logging.getLogger(__name__)

RTOL = 1e-10
ATOL = 1e-10


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int | None = None) -> np.ndarray:
    n = n or math.isqrt(v.size)
    return np.asarray(v).reshape((n, n), order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    trunc: Truncation

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.trunc.dim, self.trunc.dim):
            raise DimensionError(f"density matrix shape {m.shape} does not match {self.trunc}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def pure(cls, psi: np.ndarray, trunc: Truncation) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()), trunc)

    @classmethod
    def basis(cls, trunc: Truncation, n_c: int, n_p: int) -> "DensityMatrix":
        return cls.pure(basis_state(trunc, n_c, n_p), trunc)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def check(self, trace_tol=1e-9, herm_tol=1e-10, pos_tol=1e-8) -> None:
        if abs(self.trace - 1.0) > trace_tol:
            raise InvalidParameterError(f"trace {self.trace} differs from 1")
        if self.hermiticity_defect() > herm_tol:
            raise InvalidParameterError("density matrix is not Hermitian")
        if self.min_eigenvalue() < -pos_tol:
            raise InvalidParameterError("density matrix has negative eigenvalues")


@dataclass(frozen=True)
class PulseSchedule:
    """Piecewise-constant gate charge: list of ``(duration_ns, N_g)``."""

    segments: tuple[tuple[float, float], ...]
    description: str = ""

    def __post_init__(self):
        segs = tuple((float(a), float(b)) for a, b in self.segments)
        for dur, ng in segs:
            if dur < 0:
                raise InvalidParameterError(f"negative segment duration {dur}")
            if not 0.0 <= ng <= 1.0:
                raise InvalidParameterError(f"N_g={ng} outside [0, 1]")
        object.__setattr__(self, "segments", segs)

    @property
    def duration(self) -> float:
        return sum(s[0] for s in self.segments)


@dataclass
class ObservableSeries:
    times: np.ndarray
    N_c: np.ndarray
    N_p: np.ndarray
    mandel_Q: np.ndarray
    trace_defect: np.ndarray
    N_c_err: np.ndarray | None = None
    N_p_err: np.ndarray | None = None
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------- superoperators


def build_liouvillian(H, collapse_ops=()) -> np.ndarray:
    """Dense Liouvillian for ``-i[H, rho] + sum_k rate_k D[c_k] rho``."""
    h = np.asarray(H, dtype=complex)
    n = h.shape[0]
    if h.shape != (n, n):
        raise DimensionError("Hamiltonian must be square")
    eye = np.eye(n)
    L = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for rate, c, *_ in collapse_ops:
        if rate < 0:
            raise InvalidParameterError(f"negative rate {rate}")
        if rate == 0:
            continue
        c = np.asarray(c, dtype=complex)
        if c.shape != (n, n):
            raise DimensionError(f"collapse operator shape {c.shape} does not match H ({n})")
        cdc = c.conj().T @ c
        L += rate * (np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye))
    return L


def lindblad_rhs(H, collapse_ops=()):
    """Matrix-form right-hand side ``f(rho)``; avoids the dim^2 x dim^2 superoperator."""
    h = np.asarray(H, dtype=complex)
    ops = [(r, np.asarray(c, dtype=complex)) for r, c, *_ in collapse_ops if r > 0]
    heff = -1j * h
    for r, c in ops:
        heff = heff - 0.5 * r * (c.conj().T @ c)
    jumps = [(r, c, c.conj().T) for r, c in ops]

    def f(rho):
        out = heff @ rho
        out = out + out.conj().T
        for r, c, cd in jumps:
            out += r * (c @ rho @ cd)
        return out

    return f


# ---------------------------------------------------------------- observables


def _rho(rho) -> np.ndarray:
    return np.asarray(rho, dtype=complex)


def photon_distribution(rho, trunc: Truncation) -> np.ndarray:
    """Diagonal of the charge-traced density matrix."""
    r = _rho(rho).reshape(trunc.n_charge, trunc.n_fock, trunc.n_charge, trunc.n_fock)
    reduced = np.einsum("ipiq->pq", r)
    return np.real(np.diag(reduced)).copy()


def charge_distribution(rho, trunc: Truncation) -> np.ndarray:
    r = _rho(rho).reshape(trunc.n_charge, trunc.n_fock, trunc.n_charge, trunc.n_fock)
    return np.real(np.einsum("ipjp->ij", r).diagonal()).copy()


def mean_photons(rho, trunc: Truncation) -> float:
    p = photon_distribution(rho, trunc)
    return float(np.dot(np.arange(trunc.n_fock), p))


def mean_charge(rho, trunc: Truncation) -> float:
    return float(np.dot(np.arange(trunc.n_charge), charge_distribution(rho, trunc)))


def mandel_q(rho, trunc: Truncation, threshold: float = 1e-9) -> float:
    """(<n^2> - <n> - <n>^2) / <n>: -1 for Fock states, 0 for coherent light."""
    p = photon_distribution(rho, trunc)
    n = np.arange(trunc.n_fock)
    m1 = float(np.dot(n, p))
    if m1 <= threshold:
        raise UndefinedValueError(f"Mandel Q undefined at <n> = {m1:.3g}")
    m2 = float(np.dot(n * n, p))
    return (m2 - m1 - m1 * m1) / m1


def _mandel_or_nan(rho, trunc) -> float:
    try:
        return mandel_q(rho, trunc)
    except UndefinedValueError:
        return math.nan


def quadrature_variances(rho, trunc: Truncation, t: float = 0.0, omega0: float = 0.0):
    """Standard deviations of X1 = (a e^{iwt} + h.c.)/2 and X2 = (a e^{iwt} - h.c.)/2i."""
    a, _ = build_field_ops(trunc)
    r = _rho(rho)
    b = np.asarray(a) * np.exp(1j * omega0 * t)
    bd = b.conj().T
    x1 = 0.5 * (b + bd)
    x2 = (b - bd) / 2j
    out = []
    for x in (x1, x2):
        m = np.real(np.trace(r @ x))
        m2 = np.real(np.trace(r @ x @ x))
        out.append(math.sqrt(max(m2 - m * m, 0.0)))
    return tuple(out)


def coherent_state(alpha: complex, n_fock: int) -> np.ndarray:
    n = np.arange(n_fock)
    logfact = np.array([math.lgamma(k + 1) for k in n])
    amp = np.exp(-abs(alpha) ** 2 / 2 - 0.5 * logfact) * alpha**n
    return amp.astype(complex)


def thermal_populations(nbar: float, n_fock: int) -> np.ndarray:
    n = np.arange(n_fock)
    return (nbar / (1 + nbar)) ** n / (1 + nbar)


# ---------------------------------------------------------------- evolution


def _integrate_segment(rho0, f, duration, t_eval, rtol, atol):
    n = rho0.shape[0]

    def rhs(_t, y):
        return f(y.reshape(n, n)).ravel()

    sol = solve_ivp(
        rhs, (0.0, duration), rho0.ravel(), method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol
    )
    if sol.status != 0:
        raise StiffnessError(f"integrator failed after t={sol.t[-1] if sol.t.size else 0}: {sol.message}")
    return [y.reshape(n, n) for y in sol.y.T]


def _propagate_spectral(rho0, H, channels, t_eval):
    L = build_liouvillian(H, channels)
    out, v, last = [], vec(rho0), 0.0
    for t in t_eval:
        if t > last:
            v = sla.expm(L * (t - last)) @ v
            last = t
        out.append(unvec(v))
    return out


def _observe(rho, trunc):
    return (
        mean_charge(rho, trunc),
        mean_photons(rho, trunc),
        _mandel_or_nan(rho, trunc),
        abs(np.trace(rho) - 1.0),
    )


def evolve(
    rho0,
    schedule: PulseSchedule,
    d: DerivedParams,
    trunc: Truncation = DYNAMICS_TRUNCATION,
    sample_dt: float | None = None,
    channels=None,
    josephson: float = JOSEPHSON_HALF,
    theta_ex: float | None = None,
    rtol: float = RTOL,
    atol: float = ATOL,
    spectral_max_dim: int = 40,
    keep_states: bool = False,
):
    """Integrate the master equation through a piecewise-constant ``N_g`` schedule.

    The Hamiltonian (and Liouvillian) is rebuilt per segment; switching between
    segments is instantaneous. Samples are taken every ``sample_dt`` ns on the
    global clock plus at every segment boundary. No trace renormalization.

    Returns ``(ObservableSeries, final DensityMatrix)``; with ``keep_states`` the
    sampled states are stored in ``series.extra["states"]``.
    """
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (trunc.dim, trunc.dim):
        raise DimensionError(f"initial state shape {rho.shape} does not match {trunc}")
    if channels is None:
        channels = standard_channels(d, trunc)
    times, obs, states = [0.0], [_observe(rho, trunc)], [rho]
    clock = 0.0
    max_rate = max([r for r, *_ in channels if r > 0], default=0.0)
    slowest = min([r for r, *_ in channels if r > 0], default=0.0)
    for duration, ng in schedule.segments:
        if duration == 0.0:
            continue
        H = build_hamiltonian(d, None, ng, trunc, josephson=josephson, theta_ex=theta_ex)
        if sample_dt:
            k0 = math.floor(clock / sample_dt + 1e-9) + 1
            grid = np.arange(k0, math.floor((clock + duration) / sample_dt + 1e-9) + 1) * sample_dt - clock
            local = np.unique(np.concatenate([grid[(grid > 0) & (grid < duration)], [duration]]))
        else:
            local = np.array([duration])
        long_segment = slowest > 0 and duration > 10.0 / slowest
        if long_segment and trunc.dim <= spectral_max_dim:
            seg = _propagate_spectral(rho, H, channels, local)
        else:
            seg = _integrate_segment(rho, lindblad_rhs(H, channels), duration, local, rtol, atol)
        for tl, r in zip(local, seg):
            times.append(clock + tl)
            obs.append(_observe(r, trunc))
            if keep_states:
                states.append(r)
        rho = seg[-1]
        clock += duration
        log.debug("segment N_g=%.5f duration=%.4g ns done (max rate %.3g)", ng, duration, max_rate)
    obs = np.array(obs)
    series = ObservableSeries(np.array(times), obs[:, 0], obs[:, 1], obs[:, 2], obs[:, 3])
    if keep_states:
        series.extra["states"] = states
    return series, DensityMatrix(rho, trunc)


# ---------------------------------------------------------------- steady state


@dataclass(frozen=True)
class SteadyState:
    rho: DensityMatrix
    residual: float  # ||L vec(rho)||_2 / ||L||_F
    rcond: float


def steady_state(L: np.ndarray, trunc: Truncation, rcond_tol: float = 1e-14) -> SteadyState:
    """Null vector of ``L`` with unit trace.

    The trace functional replaces one row of ``L`` and the bordered system is
    LU-solved; a singular bordered matrix means the kernel is degenerate.
    """
    L = np.asarray(L, dtype=complex)
    n2 = L.shape[0]
    n = math.isqrt(n2)
    if n * n != n2 or n != trunc.dim:
        raise DimensionError("Liouvillian size does not match truncation")
    tr = vec(np.eye(n)).real
    row = 0
    M = L.copy()
    M[row, :] = tr
    rhs = np.zeros(n2, dtype=complex)
    rhs[row] = 1.0
    with warnings.catch_warnings():
        # singularity is reported through rcond below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    anorm = np.linalg.norm(M, 1)
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if rcond < rcond_tol:
        raise NonUniqueSteadyState(
            f"bordered Liouvillian is singular (rcond={rcond:.2e}); the kernel of L is degenerate"
        )
    x = sla.lu_solve((lu, piv), rhs, check_finite=False)
    # one step of iterative refinement
    x = x + sla.lu_solve((lu, piv), rhs - M @ x, check_finite=False)
    rho = unvec(x, n)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    xv = vec(rho)
    res = float(np.linalg.norm(L @ xv) / np.linalg.norm(L))
    return SteadyState(DensityMatrix(rho, trunc), res, float(rcond))


def kernel_dimension(L: np.ndarray, tol: float = 1e-10) -> int:
    """Numerical nullity via SVD (expensive; diagnostics only)."""
    s = np.linalg.svd(np.asarray(L), compute_uv=False)
    return int(np.sum(s < tol * s[0]))


@dataclass
class SteadyGrid:
    Ng_grid: np.ndarray
    theta_ex_grid: np.ndarray
    N_c: np.ndarray  # (theta_ex, N_g)
    N_p: np.ndarray
    residual: np.ndarray
    trace_defect: np.ndarray
    min_eig: np.ndarray
    errors: list = field(default_factory=list)


def sweep_steady(
    d: DerivedParams,
    Ng_grid,
    theta_ex_grid,
    trunc: Truncation = Truncation(1, 20),
    josephson: float = JOSEPHSON_HALF,
) -> SteadyGrid:
    ng = np.atleast_1d(np.asarray(Ng_grid, dtype=float))
    th = np.atleast_1d(np.asarray(theta_ex_grid, dtype=float))
    if ng.size == 0 or th.size == 0:
        raise ValueError("grids must be nonempty")
    shape = (th.size, ng.size)
    out = SteadyGrid(ng, th, *(np.full(shape, np.nan) for _ in range(5)))
    channels = standard_channels(d, trunc)
    for i, theta in enumerate(th):
        for j, g in enumerate(ng):
            try:
                H = build_hamiltonian(d, None, g, trunc, josephson=josephson, theta_ex=theta)
                ss = steady_state(build_liouvillian(H, channels), trunc)
            except (NonUniqueSteadyState, StiffnessError, np.linalg.LinAlgError) as exc:
                out.errors.append(((float(theta), float(g)), repr(exc)))
                continue
            r = ss.rho
            out.N_c[i, j] = mean_charge(r, trunc)
            out.N_p[i, j] = mean_photons(r, trunc)
            out.residual[i, j] = ss.residual
            out.trace_defect[i, j] = abs(r.trace - 1.0)
            out.min_eig[i, j] = r.min_eigenvalue()
    return out


__all__ = [
    "DensityMatrix",
    "ObservableSeries",
    "PulseSchedule",
    "SteadyGrid",
    "SteadyState",
    "build_liouvillian",
    "coherent_state",
    "evolve",
    "lindblad_rhs",
    "mandel_q",
    "mean_charge",
    "mean_photons",
    "photon_distribution",
    "quadrature_variances",
    "steady_state",
    "sweep_steady",
    "thermal_populations",
    "unvec",
    "vec",
]
