import dataclasses
import math

import numpy as np
import pytest

from qednonlin.maser import maser_protocol, maser_scan, maser_schedule, pi_pulse_length
from qednonlin.params import Truncation
from qednonlin.spectrum import TARGETS, locate_target

T = Truncation(1, 12)


@pytest.fixture(scope="module")
def lossless(d):
    return dataclasses.replace(d, gamma_minus=0.0, gamma_phi=0.0, kappa=0.0)


def test_schedule_shape():
    s = maser_schedule(0.38, 0.1)
    assert s.segments == ((0.1, 0.38), (0.0, 0.0))
    assert s.duration == pytest.approx(0.1)


@pytest.mark.parametrize("name", ["A1", "A2", "A3"])
def test_lossless_pi_pulse_transfers_excitation(lossless, name):
    ac = locate_target(lossless, name, t=T)
    k = TARGETS[name].photons
    tau = pi_pulse_length(ac)
    p = maser_protocol(lossless, name, tau, T, anticrossing=ac)
    assert p.photon_distribution[k] > 0.97
    assert p.N_c < 0.03


def test_lossless_rabi_period(lossless):
    ac = locate_target(lossless, "A2", t=T)
    tau = pi_pulse_length(ac)
    scan = maser_scan(lossless, "A2", [0.0, 2 * tau], T, anticrossing=ac)
    # after a 2 pi pulse the qubit is back in |1,0>
    assert scan.points[1].N_c > 0.97
    assert math.isnan(scan.points[0].mandel_Q)


def test_scan_matches_single_pulses(d):
    ac = locate_target(d, "A2", t=T)
    taus = [0.15, 0.03, 0.09]
    scan = maser_scan(d, "A2", taus, T, anticrossing=ac)
    for tau, pt in zip(taus, scan.points):
        ref = maser_protocol(d, "A2", tau, T, anticrossing=ac)
        assert pt.tau == tau
        assert pt.N_p == pytest.approx(ref.N_p, abs=1e-8)
        assert np.allclose(pt.photon_distribution, ref.photon_distribution, atol=1e-8)


def test_dissipation_lowers_fidelity(d, lossless):
    k = TARGETS["A3"].photons
    ac = locate_target(d, "A3", t=T)
    tau = pi_pulse_length(ac)
    lossy = maser_protocol(d, "A3", tau, T, anticrossing=ac)
    clean = maser_protocol(lossless, "A3", tau, T, anticrossing=ac)
    assert lossy.photon_distribution[k] < clean.photon_distribution[k]
    assert lossy.trace_defect < 1e-9


def test_negative_tau_rejected(d):
    with pytest.raises(ValueError):
        maser_scan(d, "A2", [-0.1], T)
