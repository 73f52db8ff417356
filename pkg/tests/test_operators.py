import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from qednonlin.errors import DimensionError
from qednonlin.operators import (
    JOSEPHSON_UNIT,
    OperatorMatrix,
    basis_state,
    build_charge_ops,
    build_field_ops,
    build_hamiltonian,
    coupling_operator,
    hermitian_function,
    number_op,
    parity_op,
    qubit_ops,
    standard_channels,
)
from qednonlin.params import Truncation

T = Truncation(1, 12)


def test_ladder_commutator():
    a, _ = build_field_ops(T)
    a = np.asarray(a)
    comm = a @ a.conj().T - a.conj().T @ a
    # identity except the top Fock level of each charge block
    diag = np.tile(np.r_[np.ones(T.n_p_max), -T.n_p_max], T.n_charge)
    assert np.allclose(comm, np.diag(diag))


def test_number_and_parity():
    a, _ = build_field_ops(T)
    a = np.asarray(a)
    assert np.allclose(np.asarray(number_op(T)), a.conj().T @ a)
    p = np.asarray(parity_op(T))
    assert np.allclose(p @ p, np.eye(T.dim))


def test_qubit_ops():
    sm, sz = (np.asarray(o) for o in qubit_ops(T))
    up, down = basis_state(T, 1, 3), basis_state(T, 0, 3)
    assert np.allclose(sm @ up, down)
    assert np.allclose(sm @ down, 0)
    assert up.conj() @ sz @ up == pytest.approx(1)
    assert down.conj() @ sz @ down == pytest.approx(-1)


def test_operator_matrix_read_only():
    a, _ = build_field_ops(T)
    with pytest.raises(ValueError):
        a.entries[0, 0] = 1.0


def test_truncation_mismatch():
    a, _ = build_field_ops(T)
    b, _ = build_field_ops(Truncation(1, 5))
    with pytest.raises(DimensionError):
        a @ b


def test_hermitian_function_matches_scipy(rng):
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    m = m + m.conj().T
    (c,) = hermitian_function(m, np.cos)
    assert np.allclose(c, sla.cosm(m), atol=1e-10)


# displacement-operator oracle: <0| exp(i th x) |n> = exp(-th^2/2) (i th)^n / sqrt(n!)
@pytest.mark.parametrize("theta", [0.3, 1.31194])
def test_coupling_vacuum_elements(theta):
    t = Truncation(1, 60)
    _, x = build_field_ops(t)
    nf = t.n_fock
    cos_b = np.asarray(coupling_operator(0.0, theta, x))[:nf, :nf]
    sin_b = -np.asarray(coupling_operator(math.pi / 2, theta, x))[:nf, :nf]
    g = math.exp(-theta**2 / 2)
    assert cos_b[0, 0] == pytest.approx(g, abs=1e-12)
    assert cos_b[0, 2] == pytest.approx(-g * theta**2 / math.sqrt(2), abs=1e-12)
    assert sin_b[0, 1] == pytest.approx(g * theta, abs=1e-12)
    assert sin_b[0, 3] == pytest.approx(-g * theta**3 / math.sqrt(6), abs=1e-12)


def test_coupling_parity_structure():
    _, x = build_field_ops(T)
    nf = T.n_fock
    n = np.arange(nf)
    odd = (n[:, None] - n[None, :]) % 2 == 1
    cos_b = np.asarray(coupling_operator(0.0, 1.3, x))[:nf, :nf]
    sin_b = np.asarray(coupling_operator(math.pi / 2, 1.3, x))[:nf, :nf]
    assert np.all(cos_b[odd] == 0)
    assert np.abs(sin_b[~odd]).max() < 1e-15  # cos(pi/2) round-off only


def test_uncoupled_spectrum(d):
    h = np.asarray(build_hamiltonian(d, 0.0, 0.3, T))
    assert np.allclose(h, np.diag(np.diag(h)))
    for k in range(T.dim):
        nc, npn = T.label(k)
        assert h[k, k].real == pytest.approx(d.E_C_over_hbar * (nc - 0.3) ** 2 + d.omega0 * npn)


def test_josephson_convention_factor(d):
    h_half = np.asarray(build_hamiltonian(d, None, 0.4, T))
    h_unit = np.asarray(build_hamiltonian(d, None, 0.4, T, josephson=JOSEPHSON_UNIT))
    h0 = np.asarray(build_hamiltonian(d, 0.0, 0.4, T))
    assert np.allclose(h_unit - h0, 2 * (h_half - h0))


def test_symmetries(d):
    p = np.asarray(parity_op(T))
    h0 = np.asarray(build_hamiltonian(d, None, 0.4, T, theta_ex=0.0))
    assert np.allclose(h0 @ p, p @ h0)
    # at theta_ex = pi/2 only the joint charge-photon parity survives
    nc = np.repeat(np.arange(T.n_charge), T.n_fock)
    npn = np.tile(np.arange(T.n_fock), T.n_charge)
    joint = np.diag((-1.0) ** (nc + npn))
    h1 = np.asarray(build_hamiltonian(d, None, 0.4, T, theta_ex=math.pi / 2))
    assert np.allclose(h1 @ joint, joint @ h1)


@settings(max_examples=40, deadline=None)
@given(
    ng=st.floats(0.0, 1.0),
    theta_ex=st.floats(-math.pi, math.pi),
    nc=st.integers(1, 3),
    npm=st.integers(1, 10),
)
def test_hamiltonian_hermitian(d, ng, theta_ex, nc, npm):
    h = build_hamiltonian(d, None, ng, Truncation(nc, npm), theta_ex=theta_ex)
    assert h.hermiticity_defect() < 1e-12


def test_channels(d):
    ch = standard_channels(d, T)
    assert [c.rate for c in ch] == pytest.approx([d.gamma_minus, d.gamma_phi / 2, d.kappa])
    assert {c.name for c in ch} == {"qubit_decay", "qubit_dephase", "photon_loss"}


def test_charge_ops_shape():
    N, hop = build_charge_ops(Truncation(3, 2))
    assert isinstance(N, OperatorMatrix)
    assert np.allclose(np.diag(np.asarray(N)), np.repeat(np.arange(4), 3))
    assert np.asarray(hop).sum() == pytest.approx(2 * 3 * 3)
