import math

import numpy as np
import pytest

from entropion import (
    KrausMap,
    Povm,
    RngState,
    adjoint_channel,
    ancilla_representation,
    apply_ancilla,
    apply_channel,
    apply_linear,
    choi_matrix,
    dephase,
    dephase_via_z,
    identity_channel,
    is_cptp,
    partial_trace,
    povm_channel,
    purify,
    random_cptp,
    random_density,
    random_matrix,
    random_povm,
    random_unitary,
    tensor,
    tensor_channel,
    trace_out_channel,
    von_neumann_entropy,
)


def test_kraus_map_validation():
    k = KrausMap([np.eye(2)])
    assert k.d_in == 2 and k.d_out == 2
    assert k.is_trace_preserving
    with pytest.raises(ValueError):
        KrausMap([])
    with pytest.raises(ValueError):
        KrausMap([np.eye(2), np.eye(3)])  # mismatched shapes
    # rectangular operators set d_out != d_in
    v = np.zeros((3, 2))
    v[0, 0] = v[1, 1] = 1.0
    tall = KrausMap([v])
    assert tall.d_in == 2 and tall.d_out == 3
    assert tall.is_trace_preserving


def test_completeness_defect():
    half = KrausMap([np.eye(2) / 2])
    assert not half.is_trace_preserving
    # sum K^dag K = I/4, defect = |I/4 - I| max entry = 0.75
    assert half.completeness_defect() == pytest.approx(0.75, abs=1e-14)


def test_apply_channel_unitary():
    rng = RngState(60)
    u = random_unitary(3, rng.child(0))
    rho = random_density(3, 3, rng.child(1))
    out = apply_channel(KrausMap([u]), rho)
    assert np.allclose(out, u @ rho @ u.conj().T, atol=1e-13)
    assert np.trace(out) == pytest.approx(1.0, abs=1e-13)


def test_apply_linear_general_operand():
    rng = RngState(61)
    ks = random_cptp(2, 3, rng.child(0))
    phi = KrausMap(ks)
    x = random_matrix(2, 2, rng.child(1))
    expected = sum(k @ x @ k.conj().T for k in ks)
    assert np.allclose(apply_linear(phi, x), expected, atol=1e-13)


def test_adjoint_channel_duality():
    # Tr[A Phi(B)] = Tr[Phi^*(A) B] for all A, B
    rng = RngState(62)
    phi = KrausMap(random_cptp(3, 2, rng.child(0)))
    star = adjoint_channel(phi)
    a = random_matrix(3, 3, rng.child(1))
    b = random_matrix(3, 3, rng.child(2))
    lhs = np.trace(a @ apply_linear(phi, b))
    rhs = np.trace(apply_linear(star, a) @ b)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    # adjoint of a TP map is unital
    ident = apply_linear(star, np.eye(3))
    assert np.allclose(ident, np.eye(3), atol=1e-12)


def test_dephase_kills_off_diagonal():
    rng = RngState(63)
    rho = random_density(4, 4, rng)
    out = dephase(rho)
    assert np.allclose(out, np.diag(np.diag(rho)))
    # exact zeros off the diagonal, not merely small
    assert out[0, 1] == 0.0


def test_dephase_via_z_matches_projection():
    rng = RngState(64)
    for d in range(2, 9):
        rho = random_density(d, d, rng.child(d))
        direct = dephase(rho)
        averaged = dephase_via_z(rho)
        assert np.allclose(direct, averaged, atol=1e-13)


def test_povm_validation():
    half = np.eye(2) / 2
    Povm([half, half])
    with pytest.raises(ValueError):
        Povm([half])  # does not resolve the identity
    with pytest.raises(ValueError):
        Povm([np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])])  # negative effect


def test_povm_channel_outputs_exact_diagonal():
    rng = RngState(65)
    povm = Povm(random_povm(3, 4, rng.child(0)))
    phi = povm_channel(povm)
    assert phi.d_in == 3 and phi.d_out == 4
    assert phi.is_trace_preserving
    rho = random_density(3, 3, rng.child(1))
    out = apply_channel(phi, rho)
    # diagonal entries are the Born probabilities Tr(M_a rho)
    probs = [np.trace(m @ rho).real for m in povm.effects]
    assert np.allclose(np.diag(out).real, probs, atol=1e-12)
    off = out - np.diag(np.diag(out))
    assert np.all(off == 0)  # exactly zero, not just small


def test_choi_matrix_identity_channel():
    # Choi of the identity on d=3: rank one, trace d
    c = choi_matrix(identity_channel(3))
    evs = np.linalg.eigvalsh(c)
    assert evs[-1] == pytest.approx(3.0, abs=1e-12)
    assert np.sum(evs > 1e-12) == 1
    assert np.trace(c).real == pytest.approx(3.0, abs=1e-12)


def test_choi_matrix_detects_non_cp():
    # the transpose map is positive but not CP; its Choi is the swap with
    # eigenvalue -1
    d = 2
    transpose_kraus = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            transpose_kraus.append(e)
    # Build the swap Choi directly: sum_{ij} E_ij (x) E_ij^T is the Choi of
    # the transpose when assembled as sum E_ij (x) E_ji
    swap = np.zeros((4, 4), dtype=complex)
    for i in range(d):
        for j in range(d):
            e_ij = np.zeros((d, d), dtype=complex)
            e_ij[i, j] = 1.0
            swap += tensor(e_ij, e_ij.T)
    assert np.linalg.eigvalsh(swap)[0] == pytest.approx(-1.0, abs=1e-12)


def test_is_cptp_verdicts():
    rng = RngState(66)
    phi = KrausMap(random_cptp(3, 3, rng.child(0)))
    v = is_cptp(phi)
    assert bool(v)
    assert v.is_cp and v.is_tp
    assert v.choi_min_eig > -1e-12
    assert v.completeness_defect < 1e-12
    # scaling a Kraus set breaks trace preservation but not positivity
    scaled = KrausMap([0.5 * k for k in phi.kraus_ops])
    v2 = is_cptp(scaled)
    assert v2.is_cp and not v2.is_tp and not bool(v2)


def test_tensor_channel_factorizes():
    rng = RngState(67)
    phi = KrausMap(random_cptp(2, 2, rng.child(0)))
    psi = KrausMap(random_cptp(3, 2, rng.child(1)))
    joint = tensor_channel(phi, psi)
    assert joint.d_in == 6
    a = random_density(2, 2, rng.child(2))
    b = random_density(3, 3, rng.child(3))
    out = apply_channel(joint, tensor(a, b))
    expected = tensor(apply_channel(phi, a), apply_channel(psi, b))
    assert np.allclose(out, expected, atol=1e-12)


def test_trace_out_channel_matches_partial_trace():
    rng = RngState(68)
    rho = random_density(12, 12, rng)
    dims = (2, 3, 2)
    for keep in [(0,), (1,), (0, 2), (1, 2)]:
        phi = trace_out_channel(dims, keep)
        assert is_cptp(phi).is_tp
        out = apply_channel(phi, rho)
        assert np.allclose(out, partial_trace(rho, dims, keep), atol=1e-12)


def test_ancilla_representation_roundtrip():
    rng = RngState(69)
    for d, n in [(2, 2), (3, 3), (2, 4)]:
        phi = KrausMap(random_cptp(d, n, rng.child(10 * d + n)))
        rep = ancilla_representation(phi)
        u = rep.unitary
        assert u.shape == (d * rep.anc_dim, d * rep.anc_dim)
        assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10)
        rho = random_density(d, d, rng.child(1000 + 10 * d + n))
        joint = apply_ancilla(rep, rho)
        via_dilation = partial_trace(joint, (d, rep.anc_dim), keep=(0,))
        direct = apply_channel(phi, rho)
        assert np.allclose(via_dilation, direct, atol=1e-10)


def test_ancilla_representation_deterministic():
    rng = RngState(70)
    phi = KrausMap(random_cptp(2, 3, rng))
    u1 = ancilla_representation(phi).unitary
    u2 = ancilla_representation(phi).unitary
    assert np.array_equal(u1, u2)


def test_purify_reduces_to_input():
    rng = RngState(71)
    for d in (2, 3, 5):
        rho = random_density(d, d, rng.child(d))
        psi = purify(rho)
        # full-rank input: ancilla dimension equals d
        assert psi.shape == (d * d,)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
        full = np.outer(psi, psi.conj())
        back = partial_trace(full, (d, d), keep=(0,))
        assert np.allclose(back, rho, atol=1e-10)


def test_purify_pure_state_needs_no_ancilla():
    # a pure state purifies with a one-dimensional ancilla
    rho = np.diag([1.0, 0.0])
    psi = purify(rho)
    assert psi.shape == (2,)
    assert abs(psi[0]) == pytest.approx(1.0, abs=1e-12)


def test_purification_entropy_matches():
    # both reductions of a purification carry the same spectrum
    rng = RngState(72)
    d = 4
    rho = random_density(d, 3, rng)
    psi = purify(rho)
    r = psi.size // d
    assert r == 3  # ancilla tracks the rank
    full = np.outer(psi, psi.conj())
    anc = partial_trace(full, (d, r), keep=(1,))
    assert von_neumann_entropy(anc) == pytest.approx(
        von_neumann_entropy(rho), abs=1e-10
    )


def test_stinespring_entropy_exchange():
    # applying a channel through its dilation and tracing the system out
    # gives a valid state on the environment
    rng = RngState(73)
    phi = KrausMap(random_cptp(2, 2, rng.child(0)))
    rep = ancilla_representation(phi)
    rho = random_density(2, 2, rng.child(1))
    r = rep.anc_dim
    joint = tensor(rho, np.outer(rep.anc_state, rep.anc_state.conj()))
    evolved = rep.unitary @ joint @ rep.unitary.conj().T
    env = partial_trace(evolved, (2, r), keep=(1,))
    assert np.trace(env).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(env).min() > -1e-12
