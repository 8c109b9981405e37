import numpy as np
import pytest
from scipy.linalg import expm

from spinbus import (
    ChainSpec,
    QubitCoupling,
    apply_pair_gate,
    apply_pair_to_state,
    build_basis,
    chain_swap_unitary,
    evolve,
    heisenberg_hamiltonian,
    pair_gate,
    protocol_time_compare,
    serial_effective_unitary,
    serial_protocol,
    swap_time,
)
from spinbus.basis import Statevector

import oracles


# --- two-site gates ---------------------------------------------------------

def test_pair_gate_pi_is_swap():
    np.testing.assert_allclose(pair_gate(np.pi), oracles.SWAP_2, atol=1e-14)


def test_pair_gate_half_pi_is_root_swap():
    g = pair_gate(np.pi / 2)
    np.testing.assert_allclose(g, oracles.ROOT_SWAP, atol=1e-14)
    np.testing.assert_allclose(g @ g, oracles.SWAP_2, atol=1e-14)


@pytest.mark.parametrize("theta", [0.3, np.pi / 2, np.pi, 2.2])
def test_pair_gate_is_exchange_evolution(theta):
    # e^{i theta/4} exp(-i theta s.s) on two sites
    h2 = oracles.heis(0, 1, 2)
    ref = np.exp(1j * theta / 4) * expm(-1j * theta * h2)
    np.testing.assert_allclose(pair_gate(theta), ref, atol=1e-12)


def test_pair_gate_miscalibrated():
    # wrong coupling, nominal duration: nominal phase, effective angle
    ref = np.exp(1j * np.pi / 4) * expm(-1j * 1.1 * np.pi * oracles.heis(0, 1, 2))
    np.testing.assert_allclose(pair_gate(1.1 * np.pi, np.pi), ref, atol=1e-12)


def test_pair_gate_unitary_and_composes():
    a, b = 0.7, 1.9
    ga, gb = pair_gate(a), pair_gate(b)
    np.testing.assert_allclose(ga @ ga.conj().T, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(ga @ gb, pair_gate(a + b), atol=1e-13)


def test_swap_time():
    assert swap_time(0.5) == pytest.approx(2 * np.pi)
    assert swap_time(0.5, "root") == pytest.approx(np.pi)
    assert swap_time(-0.5) == pytest.approx(2 * np.pi)  # magnitude only
    with pytest.raises(ValueError):
        swap_time(0.0)
    with pytest.raises(ValueError):
        swap_time(1.0, "half")


def test_apply_pair_gate_matches_bit_surgery():
    rng = np.random.default_rng(11)
    g = pair_gate(0.9, 1.4)
    for (i, j, n) in [(0, 1, 3), (0, 2, 3), (2, 0, 3), (1, 3, 4)]:
        ref = oracles.embed_gate(g, i, j, n)
        got = apply_pair_gate(np.eye(1 << n, dtype=complex), g, i, j, n)
        np.testing.assert_allclose(got, ref, atol=1e-13)
        psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        np.testing.assert_allclose(apply_pair_to_state(psi, g, i, j, n),
                                   ref @ psi, atol=1e-12)


# --- time evolution ---------------------------------------------------------

def _random_state(basis, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return Statevector(basis, a / np.linalg.norm(a))


def test_evolve_dense_matches_expm():
    basis = build_basis(5, sector=0.5)
    H = heisenberg_hamiltonian(ChainSpec(5), basis)
    psi = _random_state(basis, 4)
    out = evolve(H, psi, 1.7)
    ref = expm(-1.7j * H.to_dense()) @ psi.amplitudes
    np.testing.assert_allclose(out.amplitudes, ref, atol=1e-11)


def test_evolve_krylov_matches_dense():
    basis = build_basis(9, sector=0.5)
    H = heisenberg_hamiltonian(ChainSpec(9), basis)
    psi = _random_state(basis, 5)
    a = evolve(H, psi, 2.5, method="dense").amplitudes
    b = evolve(H, psi, 2.5, method="krylov").amplitudes
    np.testing.assert_allclose(b, a, atol=1e-9)
    assert abs(np.linalg.norm(b) - 1.0) < 1e-12


def test_evolve_zero_time_and_bad_method():
    basis = build_basis(3, sector=0.5)
    H = heisenberg_hamiltonian(ChainSpec(3), basis)
    psi = _random_state(basis, 6)
    assert evolve(H, psi, 0.0) is psi
    with pytest.raises(ValueError):
        evolve(H, psi, 1.0, method="magic")


def test_evolve_negative_time_inverts():
    basis = build_basis(5, sector=-0.5)
    H = heisenberg_hamiltonian(ChainSpec(5), basis)
    psi = _random_state(basis, 8)
    back = evolve(H, evolve(H, psi, 1.3), -1.3)
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-10)


# --- transfer protocols -----------------------------------------------------

def test_serial_effective_unitary_is_root_swap():
    U = serial_effective_unitary()
    ref = oracles.embed_gate(oracles.ROOT_SWAP, 1, 2, 3)
    np.testing.assert_allclose(U, ref, atol=1e-13)
    # coupling strengths must not matter
    np.testing.assert_allclose(serial_effective_unitary(0.3, 2.0), ref, atol=1e-13)


def test_serial_protocol_reference_numbers():
    spec = ChainSpec(5)
    qubits = [QubitCoupling(1, 0.05), QubitCoupling(5, 0.05)]
    res = serial_protocol(spec, qubits, source=1, target=5)
    assert res.fidelity == pytest.approx(0.9961797135678, abs=1e-9)
    assert res.leakage == pytest.approx(3.105752972e-3, rel=1e-6)
    stronger = serial_protocol(spec, [QubitCoupling(1, 0.1), QubitCoupling(5, 0.1)],
                               source=1, target=5)
    assert stronger.fidelity == pytest.approx(0.9792842984238, abs=1e-9)
    assert stronger.fidelity < res.fidelity  # slower is better
    assert stronger.elapsed < res.elapsed


def test_serial_protocol_rejects_bad_nodes():
    spec = ChainSpec(5)
    qubits = [QubitCoupling(1, 0.05), QubitCoupling(2, 0.05)]
    with pytest.raises(ValueError):
        serial_protocol(spec, qubits, source=1, target=2)  # even node
    with pytest.raises(ValueError):
        serial_protocol(spec, qubits, source=1, target=1)
    with pytest.raises(ValueError):
        serial_protocol(spec, qubits, source=1, target=3)  # nothing at 3


def test_chain_swap_perfect_is_end_permutation():
    U = chain_swap_unitary(4)
    P = np.zeros((16, 16))
    for s in range(16):
        t = (s & 0b0110) | ((s & 1) << 3) | ((s >> 3) & 1)
        P[t, s] = 1.0
    np.testing.assert_allclose(U, P, atol=1e-13)


def test_chain_swap_two_qubits_single_gate():
    np.testing.assert_allclose(chain_swap_unitary(2), pair_gate(np.pi),
                               atol=1e-14)


def test_chain_swap_coupling_broadcast():
    a = chain_swap_unitary(3, 1.001)
    b = chain_swap_unitary(3, [1.001, 1.001, 1.001])
    np.testing.assert_allclose(a, b, atol=1e-15)
    with pytest.raises(ValueError):
        chain_swap_unitary(3, [1.0, 1.0])
    with pytest.raises(ValueError):
        chain_swap_unitary(1)


def test_protocol_time_compare_values():
    tc = protocol_time_compare(50, 1.0)
    assert tc.t_chain == pytest.approx(157.08, abs=0.01)
    assert tc.t_bus == pytest.approx(93.77, abs=0.01)
    assert tc.bus_wins
    small = protocol_time_compare(2, 1.0)
    assert small.t_chain == pytest.approx(6.283, abs=0.001)
    assert small.t_bus == pytest.approx(16.32, abs=0.01)
    assert not small.bus_wins
    assert tc.crossover_N == 18
    with pytest.raises(ValueError):
        protocol_time_compare(1, 1.0)
    with pytest.raises(ValueError):
        protocol_time_compare(5, 0.0)
