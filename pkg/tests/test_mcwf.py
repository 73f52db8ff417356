import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qednonlin.lindblad import DensityMatrix, PulseSchedule, evolve
from qednonlin.mcwf import classify_jumps, effective_hamiltonian, ensemble_average, run_trajectory
from qednonlin.operators import Channel, basis_state, build_field_ops, build_hamiltonian, qubit_ops
from qednonlin.params import Truncation

T1 = Truncation(1, 1)


def _photon_loss(t, kappa=1.0):
    a, _ = build_field_ops(t)
    return [Channel(kappa, np.asarray(a), "photon_loss")]


def test_first_jump_times_exponential():
    # single photon, pure loss: waiting time ~ Exp(kappa)
    psi0 = basis_state(T1, 0, 1)
    H = np.zeros((T1.dim, T1.dim))
    times = []
    for seed in range(2000):
        rec = run_trajectory(H, _photon_loss(T1), psi0, 10.0, 0.5, seed, T1)
        if rec.jumps:
            times.append(rec.jumps[0].time)
    times = np.array(times)
    # P(no jump before t=10) = e^-10, so essentially every trajectory jumps
    assert times.size >= 1999
    ks = stats.kstest(times[times < 10.0], lambda x: (1 - np.exp(-x)) / (1 - np.exp(-10.0)))
    assert ks.statistic < 0.05


def test_seed_reproducibility():
    t = Truncation(1, 3)
    sm, _ = qubit_ops(t)
    ch = [Channel(0.8, np.asarray(sm), "qubit_decay")] + _photon_loss(t, 0.5)
    H = np.diag(np.arange(t.dim, dtype=float))
    psi0 = basis_state(t, 1, 2)
    r1 = run_trajectory(H, ch, psi0, 5.0, 0.1, 7, t)
    r2 = run_trajectory(H, ch, psi0, 5.0, 0.1, 7, t)
    r3 = run_trajectory(H, ch, psi0, 5.0, 0.1, 8, t)
    assert [j.time for j in r1.jumps] == [j.time for j in r2.jumps]
    assert np.array_equal(r1.N_p_series, r2.N_p_series)
    assert [j.time for j in r1.jumps] != [j.time for j in r3.jumps]


def test_norm_nonincreasing_between_samples():
    t = Truncation(1, 3)
    rec = run_trajectory(np.zeros((t.dim, t.dim)), _photon_loss(t), basis_state(t, 0, 3), 3.0, 0.05, 3, t)
    assert np.all(rec.norm_series <= 1.0 + 1e-12)
    assert np.all(rec.norm_series > 0)
    # three photons, three loss events at most
    assert len(rec.jumps) <= 3
    assert all(j.delta_Np == pytest.approx(-1.0) for j in rec.jumps)


def test_effective_hamiltonian_decay_part():
    t = Truncation(1, 2)
    ch = _photon_loss(t, 0.6)
    heff = effective_hamiltonian(np.zeros((t.dim, t.dim)), ch)
    a = ch[0].op
    assert np.allclose(heff, -0.3j * a.conj().T @ a)


def test_ensemble_matches_master_equation(d):
    # weak-coupling check on a small space; acceptance covers the maser-scale run
    t = Truncation(1, 3)
    H = np.asarray(build_hamiltonian(d, None, 0.38, t, theta_ex=0.0))
    sm, _ = qubit_ops(t)
    ch = [Channel(3.0, np.asarray(sm), "qubit_decay")] + _photon_loss(t, 2.0)
    psi0 = basis_state(t, 1, 0)
    ens = ensemble_average(H, ch, psi0, 0.5, 0.05, 300, 0, t)
    s, _ = evolve(DensityMatrix.pure(psi0, t), PulseSchedule([(0.5, 0.38)]), d, t,
                  sample_dt=0.05, channels=ch, theta_ex=0.0)
    assert np.allclose(ens.times, s.times)
    dev = np.abs(ens.N_p - s.N_p)
    assert np.all(dev[1:] <= 4 * ens.N_p_err[1:] + 1e-12)


def test_requires_normalized_state():
    with pytest.raises(ValueError):
        run_trajectory(np.zeros((4, 4)), [], np.ones(4), 1.0, 0.1, 0, T1)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_classification_counts(seed):
    t = Truncation(1, 2)
    sm, sz = qubit_ops(t)
    ch = [
        Channel(1.0, np.asarray(sm), "qubit_decay"),
        Channel(0.5, np.asarray(sz), "qubit_dephase"),
    ] + _photon_loss(t, 1.0)
    H = np.asarray(qubit_ops(t)[0]) + np.asarray(qubit_ops(t)[0]).T
    rec = run_trajectory(H, ch, basis_state(t, 1, 2), 3.0, 0.1, seed, t)
    s = classify_jumps(rec)
    assert sum(s.counts.values()) == len(rec.jumps)
    assert s.delta_Np_hist.sum() == len(rec.jumps)
    assert s.qubit_jumps + s.photon_jumps == len(rec.jumps)
