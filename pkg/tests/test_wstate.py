import numpy as np
import pytest

from spinbus import (
    ChainSpec,
    MeasurementError,
    closed_form_p,
    measure,
    protocol_one,
    protocol_two,
    sample_measurement,
    w_state,
)


def test_w_state_amplitudes():
    v = w_state(4)
    amps = v.amplitudes
    assert abs(v.norm - 1.0) < 1e-14
    for k in range(4):
        assert amps[1 << k] == pytest.approx(0.5)
    assert np.count_nonzero(amps) == 4
    with pytest.raises(ValueError):
        w_state(0)


def test_measure_w_state_branch():
    # finding the last qubit empty leaves W_{n-1}
    p, post = measure(w_state(3), [2], [0])
    assert p == pytest.approx(2 / 3)
    np.testing.assert_allclose(post.amplitudes, w_state(2).amplitudes,
                               atol=1e-14)
    p1, post1 = measure(w_state(3), [2], [1])
    assert p1 == pytest.approx(1 / 3)
    np.testing.assert_allclose(post1.amplitudes, [1, 0, 0, 0], atol=1e-14)


def test_measure_validates_input():
    v = w_state(3)
    with pytest.raises(ValueError):
        measure(v, [0, 0], [0, 0])
    with pytest.raises(ValueError):
        measure(v, [3], [0])
    with pytest.raises(ValueError):
        measure(v, [0], [2])
    with pytest.raises(ValueError):
        measure(v, [0, 1, 2], [0, 0, 0])  # nothing left


def test_measure_unreachable_outcome():
    from spinbus import basis_state, build_basis
    v = basis_state(build_basis(3), 0b000)
    with pytest.raises(MeasurementError):
        measure(v, [1], [1])


def test_sample_measurement_reproducible():
    v = w_state(3)
    a = sample_measurement(v, [0, 1], seed=42)
    b = sample_measurement(v, [0, 1], seed=42)
    assert a[0] == b[0]
    assert a[1] == pytest.approx(b[1])
    # drawing all outcomes across seeds stays Born-consistent
    seen = {sample_measurement(v, [2], seed=s)[0] for s in range(30)}
    assert seen == {(0,), (1,)}


def test_closed_form_values():
    assert closed_form_p("one", 3) == pytest.approx(0.75)
    assert closed_form_p("one", 2) == pytest.approx(8 / 9)
    # n [(2n-2)!!/(2n-1)!!]^2
    assert closed_form_p("two", 2) == pytest.approx(2 * (2 / 3) ** 2)
    assert closed_form_p("two", 3) == pytest.approx(3 * (8 / 15) ** 2)
    # exact rational products, evaluated with Fraction once and frozen
    assert closed_form_p("two", 50) == pytest.approx(0.7893349223043913,
                                                     abs=1e-13)
    assert closed_form_p("two", 200) == pytest.approx(0.7863805239258284,
                                                      abs=1e-13)
    with pytest.raises(ValueError):
        closed_form_p("three", 2)


def test_protocol_two_probability_exceeds_quarter_pi():
    for n in range(2, 60):
        assert closed_form_p("two", n) > np.pi / 4


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_protocol_one_effective(n):
    r = protocol_one(n)
    assert r.p_success == pytest.approx(4 * n / (n + 1) ** 2, abs=1e-12)
    assert r.p_success == pytest.approx(r.predicted_p, abs=1e-12)
    assert r.fidelity == pytest.approx(1.0, abs=1e-12)
    ideal = w_state(n).amplitudes if n > 1 else np.array([0, 1.0])
    assert abs(np.vdot(ideal, r.post_state.amplitudes)) ** 2 == (
        pytest.approx(1.0, abs=1e-12))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_protocol_two_effective(n):
    r = protocol_two(n)
    assert r.p_success == pytest.approx(closed_form_p("two", n), abs=1e-12)
    assert r.fidelity == pytest.approx(1.0, abs=1e-12)
    assert r.leakage == 0.0


def test_protocol_one_two_qubit_amplitudes():
    # heralded branch sqrt(8)/3 of the weight, discard branch -1/3
    r = protocol_one(2)
    out = r.output_state.amplitudes
    herald = out[1 << 2]
    assert herald == pytest.approx(-1 / 3, abs=1e-10)
    assert np.sqrt(np.sum(np.abs(out) ** 2) - abs(herald) ** 2) == (
        pytest.approx(np.sqrt(8) / 3, abs=1e-10))
    assert r.p_success == pytest.approx(8 / 9, abs=1e-12)


def test_protocol_microscopic_small_chain():
    # couplings J*/j_eff keep every effective coupling at J*; residual
    # infidelity and leakage are O((J*/gap)^2)
    r1 = protocol_one(2, chain=ChainSpec(5), J_star=0.05)
    assert r1.fidelity == pytest.approx(0.998478, abs=2e-4)
    assert r1.p_success == pytest.approx(8 / 9, abs=0.02)
    assert 0 < r1.leakage < 0.05
    r2 = protocol_two(2, chain=ChainSpec(5), J_star=0.05)
    assert r2.fidelity == pytest.approx(0.995450, abs=2e-4)
    assert r2.p_success == pytest.approx(closed_form_p("two", 2), abs=0.02)


def test_protocol_microscopic_needs_odd_register():
    # protocol one on even n uses an odd sacrificial register only when
    # n is odd; n=3 would need q=4 ferromagnetic nodes, so it is refused
    with pytest.raises(ValueError):
        protocol_one(3, chain=ChainSpec(9), J_star=0.05)


def test_protocol_input_validation():
    with pytest.raises(ValueError):
        protocol_one(0)
    with pytest.raises(ValueError):
        protocol_two(1)
