import numpy as np
import pytest
from scipy.linalg import expm

from spinbus import (
    BoundViolation,
    ChainSpec,
    StarModel,
    bus_gate,
    decoupling_time,
    gate_fidelity,
    max_gate_size,
    microscopic_bus_gate,
    parity_phase_gate,
    star_hamiltonian,
    timing_error,
    timing_fidelity_check,
)

import oracles


def star_dense(n, J=1.0):
    # independent build: bus on bit 0, qubits on bits 1..n
    dim = 2 ** (n + 1)
    H = np.zeros((dim, dim), dtype=complex)
    for k in range(1, n + 1):
        H += J * oracles.heis(0, k, n + 1)
    return H


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_star_hamiltonian_matches_reference(n):
    H = star_hamiltonian(StarModel(n, 0.7)).to_dense()
    np.testing.assert_allclose(H, star_dense(n, 0.7), atol=1e-13)


def test_star_model_validation():
    with pytest.raises(ValueError):
        StarModel(0)
    with pytest.raises(ValueError):
        StarModel(3, -1.0)


def test_decoupling_time():
    assert decoupling_time(3, 2.0) == pytest.approx(np.pi)
    assert decoupling_time(5, 1.0) == pytest.approx(2 * np.pi)
    assert decoupling_time(2, 1.0) == pytest.approx(4 * np.pi / 3)
    assert decoupling_time(4, 1.0) == pytest.approx(4 * np.pi)
    assert decoupling_time(6, 1.0) == pytest.approx(4 * np.pi)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_bus_gate_factorizes(n):
    model = StarModel(n, 1.0)
    rep = bus_gate(model)
    assert rep.residual < 1e-10
    # U(tau) must equal 1_bus (x) U_n , checked against dense evolution
    U = expm(-1j * rep.tau * star_dense(n))
    kron = np.kron(rep.U_n, np.eye(2))  # bus is bit 0, the low factor
    assert np.linalg.norm(U - kron, 2) < 1e-10


@pytest.mark.parametrize("n", [4, 6])
def test_bus_gate_even_is_identity(n):
    rep = bus_gate(StarModel(n, 1.0))
    assert np.linalg.norm(rep.U_n - np.eye(2 ** n), 2) < 1e-10


def test_bus_gate_odd_phases():
    rep = bus_gate(StarModel(3, 1.0))
    assert rep.phases[0.5] == pytest.approx(-1j, abs=1e-10)
    assert rep.phases[1.5] == pytest.approx(1j, abs=1e-10)
    # and for n=5 the ladder continues with e^{-i j pi}
    rep5 = bus_gate(StarModel(5, 1.0))
    for j, ph in rep5.phases.items():
        assert ph == pytest.approx(np.exp(-1j * j * np.pi), abs=1e-10)


def test_bus_gate_n2_at_its_own_time():
    rep = bus_gate(StarModel(2, 1.0))
    assert rep.tau == pytest.approx(4 * np.pi / 3)
    assert rep.residual < 1e-10
    for j, ph in rep.phases.items():
        assert ph == pytest.approx(np.exp(-1j * j * rep.tau / 2), abs=1e-10)


def test_parity_phase_gate_matches_physical_gate():
    for n in (1, 3, 5):
        got = parity_phase_gate(n)
        phys = bus_gate(StarModel(n, 1.0)).U_n
        assert np.linalg.norm(got - phys, 2) < 1e-9
        np.testing.assert_allclose(got @ got.conj().T, np.eye(2 ** n),
                                   atol=1e-12)


def test_spectrum_width_is_exact():
    for n in range(1, 7):
        w = np.linalg.eigvalsh(star_dense(n, 0.4))
        assert w[-1] - w[0] == pytest.approx(0.4 * (1 + n) / 2, abs=1e-12)


def test_timing_error_small_delta_limit():
    for n in (3, 5):
        eps, bound = timing_error(StarModel(n, 1.0), 1e-4)
        assert eps <= bound + 1e-15
        assert eps / 1e-4 == pytest.approx(np.pi / 2 * (n + 2), rel=1e-2)
    # scales linearly in delta
    e1, _ = timing_error(StarModel(3, 1.0), 1e-4)
    e2, _ = timing_error(StarModel(3, 1.0), 2e-4)
    assert e2 / e1 == pytest.approx(2.0, rel=1e-3)


def test_timing_error_zero_delta():
    eps, bound = timing_error(StarModel(4, 1.0), 0.0)
    assert eps == 0.0 and bound == 0.0


def test_timing_fidelity_bound_holds_at_decoupling_times():
    # the quadratic bound is a statement about tau = 2pi/J* (odd n) and
    # the n=2 anomaly; even n >= 4 run twice as long and can exceed it
    for n in (2, 3, 5):
        worst = timing_fidelity_check(StarModel(n, 1.0), 1e-3, trials=50)
        assert worst <= np.pi ** 2 / 2 * (n + 1) ** 2 * 1e-6
    with pytest.raises(BoundViolation):
        timing_fidelity_check(StarModel(4, 1.0), 1e-3, trials=50)


def test_max_gate_size():
    assert max_gate_size(100.0) == 78
    assert max_gate_size(10.0) == 16


def test_gate_fidelity_basics():
    U = oracles.ROOT_SWAP
    assert gate_fidelity(U, U) == pytest.approx(1.0, abs=1e-14)
    # global phase is ignored
    assert gate_fidelity(U, np.exp(0.3j) * U) == pytest.approx(1.0, abs=1e-14)
    assert gate_fidelity(np.eye(4), oracles.SWAP_2) == pytest.approx(0.25)


def test_microscopic_gate_approaches_effective_model():
    spec = ChainSpec(5)
    # n=2 decouples at its anomalous 4pi/3J*, so the reference is the
    # effective-model gate at that time, not the odd-n parity gate
    ideal = bus_gate(StarModel(2, 1.0)).U_n
    rep = microscopic_bus_gate(spec, nodes=(1, 3), J_star=0.05)
    half = microscopic_bus_gate(spec, nodes=(1, 3), J_star=0.025)
    assert gate_fidelity(rep.U_n, ideal) > 0.99
    assert gate_fidelity(half.U_n, ideal) > gate_fidelity(rep.U_n, ideal)
    # leakage out of the doublet shrinks linearly with the coupling
    assert rep.off_norm < 0.1
    assert rep.off_norm / half.off_norm == pytest.approx(2.0, rel=0.2)
    with pytest.raises(ValueError):
        microscopic_bus_gate(spec, nodes=(1, 2), J_star=0.05)  # even node
    with pytest.raises(ValueError):
        microscopic_bus_gate(spec, nodes=(1, 1), J_star=0.05)
