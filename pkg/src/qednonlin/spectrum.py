"""Eigenvalue sweeps in gate charge and refinement of avoided crossings."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, SearchFailure
from .operators import JOSEPHSON_HALF, build_hamiltonian
from .params import SPECTRUM_TRUNCATION, DerivedParams, Truncation

log = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
MIXED = "mixed"


class LabelingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SpectrumResult:
    sweep_values: np.ndarray
    levels: np.ndarray  # (grid point, level index), rad/ns
    theta_ex: float
    trunc: Truncation


@dataclass(frozen=True)
class Anticrossing:
    location_Ng: float
    gap: float  # rad/ns
    level_pair: tuple[int, int]
    diabatic_labels: tuple = field(default=(MIXED, MIXED))
    theta_ex: float = 0.0


def eigensystem(H, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(H)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol * max(1.0, np.max(np.abs(m))):
        raise NumericError("eigensystem requires a Hermitian matrix")
    try:
        return np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc


def sweep_spectrum(
    d: DerivedParams,
    E_J: float,
    theta_ex: float,
    Ng_grid,
    t: Truncation = SPECTRUM_TRUNCATION,
    josephson: float = JOSEPHSON_HALF,
) -> SpectrumResult:
    grid = np.atleast_1d(np.asarray(Ng_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("Ng_grid must be nonempty")
    if np.any(np.diff(grid) < 0):
        raise ValueError("Ng_grid must be ascending")
    levels = np.empty((grid.size, t.dim))
    for i, ng in enumerate(grid):
        H = build_hamiltonian(d, E_J, ng, t, josephson=josephson, theta_ex=theta_ex)
        levels[i] = eigensystem(H)[0]
    return SpectrumResult(grid, levels, theta_ex, t)


def _gap(d, E_J, theta_ex, pair, t, josephson, ng) -> float:
    H = build_hamiltonian(d, E_J, ng, t, josephson=josephson, theta_ex=theta_ex)
    w = np.linalg.eigvalsh(np.asarray(H))
    return float(w[pair[1]] - w[pair[0]])


def golden_section(f, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    e = a + GOLDEN * (b - a)
    fc, fe = f(c), f(e)
    while b - a > tol:
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + GOLDEN * (b - a)
            fe = f(e)
    return 0.5 * (a + b)


def _dominant_label(vec: np.ndarray, t: Truncation, threshold: float = 0.5):
    w = np.abs(vec) ** 2
    k = int(np.argmax(w))
    if w[k] < threshold:
        return MIXED
    return t.label(k)


def find_anticrossing(
    d: DerivedParams,
    E_J: float,
    theta_ex: float,
    level_pair: tuple[int, int],
    bracket: tuple[float, float],
    tol: float = 1e-5,
    t: Truncation = SPECTRUM_TRUNCATION,
    josephson: float = JOSEPHSON_HALF,
    n_coarse: int = 41,
) -> Anticrossing:
    """Minimize the gap of an adjacent level pair inside ``bracket``.

    A coarse scan locates the smallest sample; golden-section search then
    refines it between its neighbours.
    """
    lo, hi = map(float, bracket)
    pair = (int(level_pair[0]), int(level_pair[1]))
    if not lo < hi:
        raise ValueError(f"invalid bracket {bracket}")
    gap = lambda ng: _gap(d, E_J, theta_ex, pair, t, josephson, ng)  # noqa: E731
    coarse = np.linspace(lo, hi, n_coarse)
    gaps = np.array([gap(ng) for ng in coarse])
    k = int(np.argmin(gaps))
    if k == 0 or k == n_coarse - 1:
        if gaps[k] > 1e-12 * max(1.0, d.E_C_over_hbar):
            raise SearchFailure(
                f"no interior gap minimum for levels {pair} in [{lo}, {hi}]"
            )
    a, b = coarse[max(k - 1, 0)], coarse[min(k + 1, n_coarse - 1)]
    ng_star = golden_section(gap, a, b, tol)
    g_star = gap(ng_star)
    if gaps[k] < g_star:
        ng_star, g_star = float(coarse[k]), float(gaps[k])

    labels = []
    H_lo = build_hamiltonian(d, E_J, lo, t, josephson=josephson, theta_ex=theta_ex)
    _, vecs = eigensystem(H_lo)
    for idx in pair:
        lab = _dominant_label(vecs[:, idx], t)
        if lab == MIXED:
            warnings.warn(f"level {idx} has no dominant basis component at N_g={lo}", LabelingWarning)
        labels.append(lab)
    log.debug("anticrossing %s at N_g=%.6f gap=%.6g", pair, ng_star, g_star)
    return Anticrossing(float(ng_star), float(g_star), pair, tuple(labels), theta_ex)


@dataclass(frozen=True)
class Target:
    """A resonant |1,0> <-> |0,k> transition used by the pulsed-maser protocol."""

    name: str
    photons: int
    theta_ex: float
    level_pair: tuple[int, int]


# Adjacent sorted-level pairs hosting |1,0> <-> |0,k> between |0,k-1> and |0,k+1>;
# at theta_ex = 0 the odd ladder states do not interleave, hence the pair for A2.
TARGETS = {
    "A1": Target("A1", 1, math.pi / 2, (1, 2)),
    "A2": Target("A2", 2, 0.0, (2, 3)),
    "A3": Target("A3", 3, math.pi / 2, (3, 4)),
}


def resonance_estimate(d: DerivedParams, photons: int) -> float:
    """Bare crossing of |1,0> and |0,k>: N_g = 1/2 - k w0 / (2 E_C)."""
    return 0.5 - photons * d.omega0 / (2.0 * d.E_C_over_hbar)


def default_bracket(d: DerivedParams, photons: int, half_width: float | None = None):
    center = resonance_estimate(d, photons)
    if half_width is None:
        half_width = 0.25 * d.omega0 / d.E_C_over_hbar
    return center - half_width, center + half_width


def locate_target(
    d: DerivedParams,
    target: str | Target,
    t: Truncation = SPECTRUM_TRUNCATION,
    tol: float = 1e-5,
    josephson: float = JOSEPHSON_HALF,
) -> Anticrossing:
    tg = TARGETS[target] if isinstance(target, str) else target
    return find_anticrossing(
        d,
        d.E_J_over_hbar,
        tg.theta_ex,
        tg.level_pair,
        default_bracket(d, tg.photons),
        tol=tol,
        t=t,
        josephson=josephson,
    )


def parity_weights(vecs: np.ndarray, t: Truncation) -> np.ndarray:
    """Weight of each column vector in the even-photon-number sector."""
    even = (np.arange(t.dim) % t.n_fock) % 2 == 0
    return np.sum(np.abs(vecs[even]) ** 2, axis=0)

