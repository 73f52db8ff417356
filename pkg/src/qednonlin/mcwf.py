"""Monte Carlo wave-function unraveling of the master equation.

The Hamiltonian is constant over a run, so the no-jump evolution is propagated
exactly with matrix exponentials of ``H_eff = H - (i/2) sum_k rate_k c_k^dag c_k``.
Because the squared norm is nonincreasing under ``H_eff``, checking it at the
sample grid never misses a threshold crossing; the crossing time is then
bisected to ``jump_tol``.

Random stream (``numpy`` PCG64 seeded with ``seed``), consumed in this order:
one uniform threshold at the start and after every jump, and one uniform for
the channel choice at every jump.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import NumericError
from .lindblad import ObservableSeries
from .operators import PHOTON_LOSS, QUBIT_DECAY, QUBIT_DEPHASE, Channel
from .params import Truncation

JUMP_TOL = 1e-6  # ns
QUBIT_CHANNELS = (QUBIT_DECAY, QUBIT_DEPHASE)


@dataclass(frozen=True)
class JumpEvent:
    time: float
    channel: str
    pre_jump_Np: float
    post_jump_Np: float

    @property
    def delta_Np(self) -> float:
        return self.post_jump_Np - self.pre_jump_Np


@dataclass
class TrajectoryRecord:
    seed: int
    times: np.ndarray
    N_p_series: np.ndarray
    N_c_series: np.ndarray
    parity_weight_series: np.ndarray
    jumps: list = field(default_factory=list)
    norm_series: np.ndarray | None = None


class _Observables:
    def __init__(self, trunc: Truncation):
        idx = np.arange(trunc.dim)
        n_c, n_p = np.divmod(idx, trunc.n_fock)
        self.n_p = n_p.astype(float)
        self.n_c = n_c.astype(float)
        self.even = (n_p % 2 == 0).astype(float)

    def __call__(self, psi):
        w = np.abs(psi) ** 2
        s = w.sum()
        return w @ self.n_p / s, w @ self.n_c / s, w @ self.even / s


def _channels(collapse_ops):
    out = []
    for k, ch in enumerate(collapse_ops):
        rate, op, *rest = ch
        name = rest[0] if rest and rest[0] else f"channel{k}"
        if rate > 0:
            out.append(Channel(float(rate), np.asarray(op, dtype=complex), name))
    return out


def effective_hamiltonian(H, channels) -> np.ndarray:
    h = np.array(H, dtype=complex)
    for rate, c, _ in channels:
        h = h - 0.5j * rate * (c.conj().T @ c)
    return h


def run_trajectory(
    H,
    collapse_ops,
    psi0,
    t_end: float,
    sample_dt: float,
    seed: int,
    trunc: Truncation,
    jump_tol: float = JUMP_TOL,
    max_jumps: int = 1_000_000,
) -> TrajectoryRecord:
    psi = np.array(psi0, dtype=complex)
    if abs(np.vdot(psi, psi) - 1.0) > 1e-9:
        raise ValueError("psi0 must be normalized")
    channels = _channels(collapse_ops)
    heff = effective_hamiltonian(H, channels)
    rng = np.random.Generator(np.random.PCG64(seed))
    obs = _Observables(trunc)

    n_steps = int(math.floor(t_end / sample_dt + 1e-9))
    times = np.arange(n_steps + 1) * sample_dt
    if times[-1] < t_end - 1e-12:
        times = np.append(times, t_end)
    U_dt = sla.expm(-1j * heff * sample_dt)

    def prop(s):
        return U_dt if s == sample_dt else sla.expm(-1j * heff * s)

    rec = np.empty((times.size, 4))
    rec[0] = (*obs(psi), 1.0)
    jumps: list[JumpEvent] = []
    threshold = rng.random()
    t = 0.0
    for k in range(1, times.size):
        t_next = times[k]
        while True:
            span = t_next - t
            phi = (U_dt if abs(span - sample_dt) < 1e-15 else prop(span)) @ psi
            if np.vdot(phi, phi).real > threshold:
                psi, t = phi, t_next
                break
            # bisect the first time the squared norm reaches the threshold
            lo, hi = 0.0, span
            while hi - lo > jump_tol:
                mid = 0.5 * (lo + hi)
                if np.linalg.norm(prop(mid) @ psi) ** 2 > threshold:
                    lo = mid
                else:
                    hi = mid
            psi_j = prop(hi) @ psi
            t = t + hi
            weights = np.array([rate * np.linalg.norm(c @ psi_j) ** 2 for rate, c, _ in channels])
            total = weights.sum()
            if not total > 0:
                raise NumericError(f"norm decayed at t={t:.6g} with no active jump channel")
            j = int(np.searchsorted(np.cumsum(weights) / total, rng.random(), side="right"))
            j = min(j, len(channels) - 1)
            rate, c, name = channels[j]
            pre = obs(psi_j)[0]
            psi = c @ psi_j
            psi = psi / np.linalg.norm(psi)
            jumps.append(JumpEvent(float(t), name, float(pre), float(obs(psi)[0])))
            if len(jumps) > max_jumps:
                raise NumericError("jump count limit exceeded")
            threshold = rng.random()
        norm2 = np.vdot(psi, psi).real
        if norm2 <= 0 or not math.isfinite(norm2):
            raise NumericError(f"state norm underflow at t={t:.6g}")
        rec[k] = (*obs(psi), norm2)
    return TrajectoryRecord(
        seed=seed,
        times=times,
        N_p_series=rec[:, 0],
        N_c_series=rec[:, 1],
        parity_weight_series=rec[:, 2],
        jumps=jumps,
        norm_series=rec[:, 3],
    )


def ensemble_average(
    H,
    collapse_ops,
    psi0,
    t_end: float,
    sample_dt: float,
    n_traj: int,
    seed0: int,
    trunc: Truncation,
    keep_records: bool = False,
) -> ObservableSeries:
    """Mean and standard error of N_p, N_c over seeds ``seed0 .. seed0 + n_traj - 1``."""
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    recs = [
        run_trajectory(H, collapse_ops, psi0, t_end, sample_dt, seed0 + i, trunc)
        for i in range(n_traj)
    ]
    return summarize(recs, keep_records=keep_records)


def summarize(recs, keep_records: bool = False) -> ObservableSeries:
    n_p = np.array([r.N_p_series for r in recs])
    n_c = np.array([r.N_c_series for r in recs])
    n = len(recs)

    def sem(x):
        if n < 2:
            return np.zeros(x.shape[1])
        return x.std(axis=0, ddof=1) / math.sqrt(n)

    nan = np.full(n_p.shape[1], np.nan)
    series = ObservableSeries(
        times=recs[0].times,
        N_c=n_c.mean(axis=0),
        N_p=n_p.mean(axis=0),
        mandel_Q=nan,
        trace_defect=np.zeros(n_p.shape[1]),
        N_c_err=sem(n_c),
        N_p_err=sem(n_p),
    )
    if keep_records:
        series.extra["records"] = recs
    return series


@dataclass(frozen=True)
class JumpSummary:
    counts: dict
    delta_Np_edges: np.ndarray
    delta_Np_hist: np.ndarray
    delta_Np: np.ndarray
    channels: tuple

    @property
    def qubit_jumps(self) -> int:
        return sum(self.counts.get(c, 0) for c in QUBIT_CHANNELS)

    @property
    def photon_jumps(self) -> int:
        return self.counts.get(PHOTON_LOSS, 0)


def classify_jumps(record: TrajectoryRecord, bin_width: float = 0.25) -> JumpSummary:
    counts: dict[str, int] = {}
    for ev in record.jumps:
        counts[ev.channel] = counts.get(ev.channel, 0) + 1
    deltas = np.array([ev.delta_Np for ev in record.jumps])
    if deltas.size == 0:
        edges = np.array([])
        hist = np.array([], dtype=int)
    else:
        lo = bin_width * math.floor(deltas.min() / bin_width)
        hi = bin_width * (math.floor(deltas.max() / bin_width) + 1)
        edges = np.arange(lo, hi + 0.5 * bin_width, bin_width)
        hist, edges = np.histogram(deltas, bins=edges)
    return JumpSummary(counts, edges, hist, deltas, tuple(ev.channel for ev in record.jumps))
