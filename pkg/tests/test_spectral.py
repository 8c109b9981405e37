import numpy as np
import pytest

from spinbus import (
    ChainSpec,
    LanczosError,
    adiabatic_bus_bound,
    build_basis,
    bus_manifold,
    eig_dense,
    eig_lowest,
    fit_power_law,
    gap_formula,
    gap_physical,
    heisenberg_hamiltonian,
    mean_odd_coupling,
)

import oracles


def chain_sector_h(N):
    return heisenberg_hamiltonian(ChainSpec(N), build_basis(N, sector=0.5))


def test_eig_dense_matches_numpy():
    H = chain_sector_h(7)
    dec = eig_dense(H)
    w, v = np.linalg.eigh(H.to_dense())
    np.testing.assert_allclose(dec.values, w, atol=1e-12)
    # same eigenspaces: columns agree up to phase
    ov = np.abs(np.sum(np.conj(dec.vectors[:, :5]) * v[:, :5], axis=0))
    np.testing.assert_allclose(ov, 1.0, atol=1e-9)


@pytest.mark.parametrize("N", [13, 15])
def test_lanczos_agrees_with_dense(N):
    # N=15 sector dim 6435 crosses the dense cutoff, exercising Lanczos
    H = chain_sector_h(N)
    dec = eig_lowest(H, k=2)
    w = np.linalg.eigvalsh(H.to_dense())
    np.testing.assert_allclose(dec.values, w[:2], atol=1e-9)


def test_lanczos_budget_exhaustion_raises():
    H = chain_sector_h(15)
    with pytest.raises(LanczosError):
        eig_lowest(H, k=2, max_iter=3)


def test_eigenvector_residuals():
    H = chain_sector_h(15)
    dec = eig_lowest(H, k=2)
    for i in range(2):
        v = dec.vectors[:, i]
        r = H.matvec(v) - dec.values[i] * v
        assert np.linalg.norm(r) < 1e-8


@pytest.mark.parametrize("N", sorted(oracles.GAPS))
def test_frozen_gaps(N):
    m = bus_manifold(ChainSpec(N))
    np.testing.assert_allclose(m.gap, oracles.GAPS[N], rtol=1e-10)


@pytest.mark.parametrize("N", sorted(oracles.JEFF))
def test_frozen_couplings(N):
    m = bus_manifold(ChainSpec(N))
    np.testing.assert_allclose(m.j_eff, oracles.JEFF[N], atol=2e-12)
    np.testing.assert_allclose(mean_odd_coupling(m.j_eff),
                               oracles.MEAN_ODD_JEFF[N], rtol=1e-10)


def test_couplings_alternate_and_reflect():
    for N in (5, 9, 13):
        j = bus_manifold(ChainSpec(N)).j_eff
        assert np.all(j[0::2] > 0) and np.all(j[1::2] < 0)
        np.testing.assert_allclose(j, j[::-1], atol=1e-9)


def test_manifold_states_are_flip_partners():
    spec = ChainSpec(5)
    m = bus_manifold(spec)
    # flipping every spin of state1 must reproduce state0 exactly
    full1 = m.state1.to_full()
    flipped = np.zeros_like(full1)
    mask = (1 << 5) - 1
    for s in range(32):
        flipped[s ^ mask] = full1[s]
    np.testing.assert_allclose(flipped, m.state0.to_full(), atol=1e-12)


def test_manifold_phase_convention():
    amps = bus_manifold(ChainSpec(7)).state1.amplitudes
    lead = amps[np.argmax(np.abs(amps))]
    assert abs(lead.imag) < 1e-12 and lead.real > 0


def test_manifold_energies_match_dense():
    spec = ChainSpec(7)
    m = bus_manifold(spec)
    w = np.linalg.eigvalsh(oracles.chain_h(7))
    np.testing.assert_allclose(m.energy, w[0], atol=1e-10)


def test_single_site_bus():
    m = bus_manifold(ChainSpec(1))
    assert np.isinf(m.gap)
    np.testing.assert_allclose(m.j_eff, [1.0])


def test_bus_manifold_rejects_even():
    with pytest.raises(ValueError):
        bus_manifold(ChainSpec(4))


def test_gap_formula_and_physical_units():
    assert gap_formula(10, 2.0) == pytest.approx(2.0 * np.pi ** 2 / 20.0)
    # 1 meV chain of 60000 sites lands near 1 mK
    assert 0.9 < gap_physical(1.0, 60000) < 1.05
    assert 90 < gap_physical(2.0, 1200) < 105


def test_fit_power_law_recovers_exact_law():
    N = np.array([3.0, 5.0, 9.0, 17.0])
    fit = fit_power_law(N, 2.5 * N ** -0.75)
    assert fit.exponent == pytest.approx(-0.75, abs=1e-12)
    assert fit.prefactor == pytest.approx(2.5, rel=1e-12)
    assert fit.log_rms < 1e-12
    np.testing.assert_allclose(fit.predict(N), 2.5 * N ** -0.75, rtol=1e-12)


def test_fit_power_law_input_checks():
    with pytest.raises(ValueError):
        fit_power_law([3.0], [1.0])
    with pytest.raises(ValueError):
        fit_power_law([3.0, 5.0], [1.0, -1.0])


def test_frozen_gap_fits():
    Ns = sorted(oracles.GAPS)
    gaps = [oracles.GAPS[N] for N in Ns]
    assert fit_power_law(Ns, gaps).exponent == pytest.approx(
        oracles.GAP_FIT_ALL, abs=1e-5)
    tail = [N for N in Ns if N >= 7]
    assert fit_power_law(tail, [oracles.GAPS[N] for N in tail]).exponent == (
        pytest.approx(oracles.GAP_FIT_TAIL, abs=1e-5))


def test_adiabatic_bus_bound():
    assert adiabatic_bus_bound(100.0) == 60881
