"""Truncated product-basis operators and the circuit Hamiltonian.

All operators act on |n_c> (x) |n_p> with charge-major flat ordering (see
:class:`~qednonlin.params.Truncation`). Matrices are dense ``complex128``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, NumericError
from .params import DerivedParams, Truncation

# cos(delta) = (e^{i delta} + e^{-i delta}) / 2 acting on the charge ladder.
# With the unit hopping matrix below, HALF gives the two-level form
# -(E_J/2)(sigma_- + sigma_-^dag); UNIT is the bare matrix-element reading.
JOSEPHSON_HALF = 0.5
JOSEPHSON_UNIT = 1.0

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    trunc: Truncation
    hermitian_flag: bool = False

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        if m.shape[0] != self.trunc.dim:
            raise DimensionError(f"operator of dim {m.shape[0]} does not match {self.trunc}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.trunc, self.hermitian_flag)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            _check_same(self, other)
            return OperatorMatrix(self.entries @ other.entries, self.trunc)
        return self.entries @ other


def _check_same(*ops: OperatorMatrix) -> Truncation:
    t = ops[0].trunc
    for o in ops[1:]:
        if o.trunc != t:
            raise DimensionError(f"truncation mismatch: {t} vs {o.trunc}")
    return t


def _fock_annihilation(n_fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1)


def _on_fock(t: Truncation, m: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(t.n_charge), m)


def _on_charge(t: Truncation, m: np.ndarray) -> np.ndarray:
    return np.kron(m, np.eye(t.n_fock))


def build_field_ops(t: Truncation) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Annihilation operator ``a`` and quadrature ``x = a + a^dag`` (identity on charge)."""
    a = _fock_annihilation(t.n_fock)
    x = a + a.T
    return (
        OperatorMatrix(_on_fock(t, a), t),
        OperatorMatrix(_on_fock(t, x), t, hermitian_flag=True),
    )


def build_charge_ops(t: Truncation) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Cooper-pair number ``N`` and the unit nearest-neighbour hopping matrix."""
    n = np.diag(np.arange(t.n_charge, dtype=float))
    hop = np.eye(t.n_charge, k=1) + np.eye(t.n_charge, k=-1)
    return (
        OperatorMatrix(_on_charge(t, n), t, hermitian_flag=True),
        OperatorMatrix(_on_charge(t, hop), t, hermitian_flag=True),
    )


def qubit_ops(t: Truncation) -> tuple[OperatorMatrix, OperatorMatrix]:
    """``sigma_-`` = |0><1| and ``sigma_z`` = |1><1| - |0><0| on the two lowest charge states."""
    sm = np.zeros((t.n_charge, t.n_charge))
    sm[0, 1] = 1.0
    sz = np.zeros((t.n_charge, t.n_charge))
    sz[0, 0], sz[1, 1] = -1.0, 1.0
    return OperatorMatrix(_on_charge(t, sm), t), OperatorMatrix(_on_charge(t, sz), t, True)


def number_op(t: Truncation) -> OperatorMatrix:
    return OperatorMatrix(_on_fock(t, np.diag(np.arange(t.n_fock, dtype=float))), t, True)


def parity_op(t: Truncation) -> OperatorMatrix:
    p = np.diag((-1.0) ** np.arange(t.n_fock))
    return OperatorMatrix(_on_fock(t, p), t, True)


def hermitian_function(m: np.ndarray, *funcs) -> list[np.ndarray]:
    """Apply scalar functions to a Hermitian matrix through its eigendecomposition."""
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    vh = v.conj().T
    return [(v * f(w)) @ vh for f in funcs]


def coupling_operator(theta_ex: float, theta_L: float, x: OperatorMatrix) -> OperatorMatrix:
    """cos(theta_ex + theta_L * x) for the Hermitian quadrature ``x``.

    The charge factor of ``x`` is the identity, so the matrix function is
    evaluated on one Fock block and re-embedded.
    """
    t = x.trunc
    nf = t.n_fock
    block = np.asarray(x)[:nf, :nf]
    if theta_L == 0.0:
        c = math.cos(theta_ex) * np.eye(nf)
    else:
        cos_x, sin_x = hermitian_function(
            block, lambda w: np.cos(theta_L * w), lambda w: np.sin(theta_L * w)
        )
        # x anticommutes with photon parity: cos(theta x) is parity-even and
        # sin(theta x) parity-odd; drop eigensolver round-off outside those blocks
        n = np.arange(nf)
        same = (n[:, None] - n[None, :]) % 2 == 0
        cos_x = np.where(same, cos_x.real, 0.0)
        sin_x = np.where(same, 0.0, sin_x.real)
        c = math.cos(theta_ex) * cos_x - math.sin(theta_ex) * sin_x
        c = 0.5 * (c + c.T)
    return OperatorMatrix(_on_fock(t, c), t, hermitian_flag=True)


def build_hamiltonian(
    d: DerivedParams,
    E_J: float | None,
    N_g: float,
    t: Truncation,
    josephson: float = JOSEPHSON_HALF,
    theta_ex: float | None = None,
) -> OperatorMatrix:
    """H = E_C (N - N_g)^2 + w0 a^dag a - E_J * josephson * C(x) * hop.

    ``E_J`` and ``theta_ex`` default to the values carried by ``d``.
    """
    E_J = d.E_J_over_hbar if E_J is None else E_J
    theta_ex = d.theta_ex if theta_ex is None else theta_ex
    N, hop = build_charge_ops(t)
    a, x = build_field_ops(t)
    _check_same(N, hop, a, x)
    shifted = np.asarray(N) - N_g * np.eye(t.dim)
    h = d.E_C_over_hbar * (shifted @ shifted) + d.omega0 * (a.dag @ a).entries
    if E_J != 0.0:
        cpl = coupling_operator(theta_ex, d.theta_L, x)
        # charge and Fock factors commute, so the product is Hermitian
        h = h - E_J * josephson * (cpl.entries @ hop.entries)
    h = 0.5 * (h + h.conj().T)
    return OperatorMatrix(h, t, hermitian_flag=True)


class Channel(NamedTuple):
    """Lindblad channel ``rate * D[op]``."""

    rate: float
    op: np.ndarray
    name: str = ""


QUBIT_DECAY = "qubit_decay"
QUBIT_DEPHASE = "qubit_dephase"
PHOTON_LOSS = "photon_loss"


def standard_channels(d: DerivedParams, t: Truncation) -> list[Channel]:
    """gamma_- D[sigma_-] + (gamma_phi/2) D[sigma_z] + kappa D[a]."""
    sm, sz = qubit_ops(t)
    a, _ = build_field_ops(t)
    return [
        Channel(d.gamma_minus, sm.entries, QUBIT_DECAY),
        Channel(d.gamma_phi / 2.0, sz.entries, QUBIT_DEPHASE),
        Channel(d.kappa, a.entries, PHOTON_LOSS),
    ]


def basis_state(t: Truncation, n_c: int, n_p: int) -> np.ndarray:
    psi = np.zeros(t.dim, dtype=complex)
    psi[t.index(n_c, n_p)] = 1.0
    return psi
