"""Circuit parameters and their conversion to model energies.

Internal units: hbar = 1, time in ns, angular frequencies (and energies) in
rad/ns. Raw circuit values are given in aF and nH; rates are angular. A cyclic
frequency ``f`` in GHz corresponds to ``2*pi*f`` rad/ns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy import constants

from .errors import InvalidParameterError

TWO_PI = 2.0 * math.pi

_E = constants.e
_HBAR = constants.hbar
FLUX_QUANTUM = math.pi * _HBAR / _E  # Wb, superconducting flux quantum h/2e

_AF = 1e-18
_NH = 1e-9
_PER_S_TO_PER_NS = 1e-9


def ghz(f: float) -> float:
    """Cyclic frequency in GHz -> angular frequency in rad/ns."""
    return TWO_PI * f


def to_ghz(w: float) -> float:
    """Angular frequency in rad/ns -> cyclic GHz."""
    return w / TWO_PI


@dataclass(frozen=True)
class PhysicalParams:
    """Raw circuit values. Defaults are the device of the reference design."""

    C_g: float = 300.0  # aF
    C_j: float = 50.0  # aF
    E_J_over_hbar: float = TWO_PI * 10.0  # rad/ns
    L: float = 100.0  # nH
    C: float = 500.0  # aF
    xi: float = 1.0
    theta_ex: float = 0.0
    gamma_minus: float = TWO_PI * 0.06  # rad/ns
    gamma_phi: float = TWO_PI * 0.13  # rad/ns
    Q_factor: float = 5e3

    def __post_init__(self):
        validate_physical(self)

    def with_(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)


def validate_physical(p: PhysicalParams) -> None:
    for name in ("C_g", "C_j", "L", "C", "Q_factor"):
        v = getattr(p, name)
        if not (v > 0 and math.isfinite(v)):
            raise InvalidParameterError(f"{name} must be positive and finite, got {v!r}")
    for name in ("E_J_over_hbar", "gamma_minus", "gamma_phi"):
        v = getattr(p, name)
        if not (v >= 0 and math.isfinite(v)):
            raise InvalidParameterError(f"{name} must be non-negative, got {v!r}")
    if not 0.0 <= p.xi <= 1.0:
        raise InvalidParameterError(f"xi must lie in [0, 1], got {p.xi!r}")
    if not 0.0 <= p.theta_ex <= math.pi / 2 + 1e-12:
        raise InvalidParameterError(f"theta_ex must lie in [0, pi/2], got {p.theta_ex!r}")


@dataclass(frozen=True)
class DerivedParams:
    E_C_over_hbar: float  # rad/ns
    omega0: float  # rad/ns
    Phi_r: float  # Wb
    Q_r: float  # C
    theta_L: float  # rad
    kappa: float  # rad/ns
    n_p_max_physical: float
    # carried along so downstream code needs only one object
    E_J_over_hbar: float = TWO_PI * 10.0
    theta_ex: float = 0.0
    gamma_minus: float = TWO_PI * 0.06
    gamma_phi: float = TWO_PI * 0.13

    def with_(self, **changes) -> "DerivedParams":
        return replace(self, **changes)


def derive_params(p: PhysicalParams) -> DerivedParams:
    """Charging energy, resonator frequency, zero-point flux/charge, coupling phase."""
    validate_physical(p)
    C_sigma = (p.C_g + 2.0 * p.C_j) * _AF
    L = p.L * _NH
    C = p.C * _AF
    E_C = (2.0 * _E) ** 2 / (2.0 * C_sigma)  # J
    omega0 = 1.0 / math.sqrt(L * C)  # rad/s
    Z = math.sqrt(L / C)
    Phi_r = math.sqrt(_HBAR / 2.0 * Z)
    Q_r = math.sqrt(_HBAR / 2.0 / Z)
    theta_L = math.pi * p.xi * Phi_r / FLUX_QUANTUM
    E_C_w = E_C / _HBAR * _PER_S_TO_PER_NS
    w0 = omega0 * _PER_S_TO_PER_NS
    return DerivedParams(
        E_C_over_hbar=E_C_w,
        omega0=w0,
        Phi_r=Phi_r,
        Q_r=Q_r,
        theta_L=theta_L,
        kappa=w0 / p.Q_factor,
        n_p_max_physical=E_C_w / w0,
        E_J_over_hbar=p.E_J_over_hbar,
        theta_ex=p.theta_ex,
        gamma_minus=p.gamma_minus,
        gamma_phi=p.gamma_phi,
    )


def reconstruct_lc(d: DerivedParams) -> tuple[float, float]:
    """Recover (L in nH, C in aF) from omega0 and the zero-point flux."""
    Z = 2.0 * d.Phi_r**2 / _HBAR
    w = d.omega0 / _PER_S_TO_PER_NS
    return Z / w / _NH, 1.0 / (Z * w) / _AF


@dataclass(frozen=True)
class Truncation:
    """Product basis |n_c> (x) |n_p>, flat index ``n_c * (n_p_max + 1) + n_p``."""

    n_c_max: int = 1
    n_p_max: int = 30

    def __post_init__(self):
        if int(self.n_c_max) != self.n_c_max or self.n_c_max < 1:
            raise InvalidParameterError(f"n_c_max must be an integer >= 1, got {self.n_c_max!r}")
        if int(self.n_p_max) != self.n_p_max or self.n_p_max < 1:
            raise InvalidParameterError(f"n_p_max must be an integer >= 1, got {self.n_p_max!r}")

    @property
    def n_charge(self) -> int:
        return self.n_c_max + 1

    @property
    def n_fock(self) -> int:
        return self.n_p_max + 1

    @property
    def dim(self) -> int:
        return self.n_charge * self.n_fock

    def index(self, n_c: int, n_p: int) -> int:
        if not (0 <= n_c <= self.n_c_max and 0 <= n_p <= self.n_p_max):
            raise IndexError(f"state |{n_c},{n_p}> outside truncation {self}")
        return n_c * self.n_fock + n_p

    def label(self, k: int) -> tuple[int, int]:
        return divmod(int(k), self.n_fock)


DYNAMICS_TRUNCATION = Truncation(n_c_max=1, n_p_max=30)
SPECTRUM_TRUNCATION = Truncation(n_c_max=4, n_p_max=12)
REFERENCE_DEVICE = PhysicalParams()
