"""Probabilistic W-state preparation through one collective bus gate.

Both protocols apply the parity phase gate (e^{-i pi j} per total-spin-j
sector) to a product state and postselect on the sacrificial qubits: one
sacrificial qubit heralding on 0, or n-1 of them heralding on all-ones.
Success probabilities admit closed forms that the simulations must hit at
double precision.
"""

import math
from dataclasses import dataclass

import numpy as np

from .basis import Statevector, build_basis
from .busgate import decoupling_time, parity_phase_gate
from .dynamics import _krylov_propagate
from .hamiltonian import pair_hamiltonian
from .spectral import DENSE_CUTOFF, bus_manifold

__all__ = [
    "MeasurementError", "ClaimViolation", "w_state", "measure",
    "sample_measurement", "ProtocolResult", "protocol_one", "protocol_two",
    "closed_form_p",
]


class MeasurementError(RuntimeError):
    """Conditioning on an outcome whose probability is numerically zero."""


class ClaimViolation(RuntimeError):
    """A built-in consistency assertion failed."""


def w_state(n):
    """(|0...01> + |0...10> + ... + |10...0>) / sqrt(n)."""
    if n < 1:
        raise ValueError("need at least one qubit")
    basis = build_basis(n)
    amps = np.zeros(basis.dim, dtype=complex)
    amps[[1 << k for k in range(n)]] = 1 / math.sqrt(n)
    return Statevector(basis, amps)


def measure(state, qubit_indices, outcome_bits):
    """Project qubits onto given bits; return (probability, remaining state).

    The post-measurement state lives on the unmeasured qubits, kept in
    ascending bit order.  Raises MeasurementError when the outcome carries
    no weight.
    """
    if state.basis.sector is not None:
        raise ValueError("measurement operates on the full computational basis")
    n = state.basis.n_sites
    idx = [int(i) for i in qubit_indices]
    if len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx):
        raise ValueError("qubit indices must be distinct and in range")
    if len(outcome_bits) != len(idx) or any(b not in (0, 1) for b in outcome_bits):
        raise ValueError("need one 0/1 outcome per measured qubit")
    if len(idx) == n:
        raise ValueError("at least one qubit must stay unmeasured")

    states = state.basis.states
    keep = np.ones(state.basis.dim, dtype=bool)
    for i, b in zip(idx, outcome_bits):
        keep &= ((states >> i) & 1) == b
    p = float(np.sum(np.abs(state.amplitudes[keep]) ** 2))
    if p < 1e-14:
        raise MeasurementError("outcome unreachable (probability < 1e-14)")

    rest = [k for k in range(n) if k not in idx]
    sub = np.zeros(state.basis.dim, dtype=np.int64)
    for t, k in enumerate(rest):
        sub |= ((states >> k) & 1) << t
    post_basis = build_basis(len(rest))
    post = np.zeros(post_basis.dim, dtype=complex)
    post[sub[keep]] = state.amplitudes[keep]
    return p, Statevector(post_basis, post / math.sqrt(p))


def sample_measurement(state, qubit_indices, seed=None):
    """Demo mode: draw one outcome by the Born rule, then project.

    Returns (outcome tuple, probability, post state).  Analysis code should
    use measure() directly; this exists for illustrative runs only.
    """
    rng = np.random.default_rng(seed)
    n = state.basis.n_sites
    idx = [int(i) for i in qubit_indices]
    states = state.basis.states
    meas = np.zeros(state.basis.dim, dtype=np.int64)
    for t, k in enumerate(idx):
        meas |= ((states >> k) & 1) << t
    probs = np.bincount(meas, weights=np.abs(state.amplitudes) ** 2,
                        minlength=1 << len(idx))
    draw = rng.choice(probs.shape[0], p=probs / probs.sum())
    outcome = tuple((int(draw) >> t) & 1 for t in range(len(idx)))
    p, post = measure(state, idx, outcome)
    return outcome, p, post


@dataclass
class ProtocolResult:
    """One heralded run: success branch, its weight, and the target overlap."""
    n: int
    p_success: float
    post_state: Statevector
    fidelity: float
    predicted_p: float
    output_state: Statevector
    leakage: float = 0.0


def closed_form_p(protocol, n):
    """Exact success probability: 4n/(n+1)^2, or n [(2n-2)!!/(2n-1)!!]^2."""
    if protocol == "one":
        if n < 1:
            raise ValueError("protocol one needs n >= 1")
        return 4 * n / (n + 1) ** 2
    if protocol == "two":
        if n < 2:
            raise ValueError("protocol two needs n >= 2")
        prod = 1.0
        for k in range(1, n):
            prod *= 2 * k / (2 * k + 1)
        return n * prod ** 2
    raise ValueError(f"unknown protocol {protocol!r}")


def _fix_phase(amps):
    lead = np.argmax(np.abs(amps))
    ph = amps[lead] / abs(amps[lead])
    return amps / ph


def _register_output(q, init_cfg, chain=None, J_star=0.05):
    """State of the q-qubit register after the collective gate.

    Effective mode applies the parity phase gate exactly.  Microscopic mode
    attaches the register to the first q odd nodes of `chain`, evolves the
    full system for the decoupling time, and projects the bus back onto its
    initial doublet branch; the discarded weight is returned as leakage.
    """
    if chain is None:
        out = parity_phase_gate(q)[:, init_cfg].copy()
        return out, 0.0
    if q % 2 == 0:
        raise ValueError("microscopic runs need an odd register: even-size "
                         "registers have no decoupled non-trivial gate")
    nodes = range(1, 2 * q, 2)
    if chain.N < 2 * q - 1:
        raise ValueError(f"chain too short: {q} qubits need N >= {2 * q - 1}")
    man = bus_manifold(chain)
    N = chain.N
    full = build_basis(N + q)
    bonds = [(i, i + 1) for i in range(N - 1)]
    vals = list(chain.bond_couplings())
    for k, node in enumerate(nodes):
        bonds.append((node - 1, N + k))
        vals.append(J_star / man.j_eff[node - 1])
    H = pair_hamiltonian(full, bonds, vals, B=chain.B)
    tau = decoupling_time(q, J_star)

    psi1 = man.state1.to_full()
    psi = np.zeros(full.dim, dtype=complex)
    lo = init_cfg << N
    psi[lo:lo + (1 << N)] = psi1
    if full.dim <= DENSE_CUTOFF:
        w, V = np.linalg.eigh(H.to_dense())
        out_full = V @ (np.exp(-1j * w * tau) * (V.conj().T @ psi))
    else:
        out_full = _krylov_propagate(H, psi, tau)
    reg = out_full.reshape(1 << q, 1 << N) @ psi1.conj()
    weight = float(np.linalg.norm(reg))
    return reg / weight, 1.0 - weight ** 2


def protocol_one(n, chain=None, J_star=0.05):
    """Gate on |0..0>_data |1>_sac, herald the sacrificial qubit at 0.

    Data qubits are bits 0..n-1, the sacrificial qubit is bit n.  On
    success the data register carries |W_n> exactly (effective mode).
    """
    if n < 1:
        raise ValueError("need n >= 1 data qubits")
    q = n + 1
    out, leakage = _register_output(q, 1 << n, chain, J_star)
    full = Statevector(build_basis(q), _fix_phase(out))
    p, post = measure(full, [n], [0])
    fid = min(float(abs(post.overlap(w_state(n))) ** 2), 1.0)
    return ProtocolResult(n, p, post, fid, closed_form_p("one", n), full, leakage)


def protocol_two(n, chain=None, J_star=0.05):
    """Gate on |1>^n_data |0>^(n-1)_sac, herald all sacrificial qubits at 1.

    Uses 2n-1 qubits total (always an odd register).  The heralded data
    register is |W_n>; the run aborts if p fails the > pi/4 floor.
    """
    if n < 2:
        raise ValueError("need n >= 2 (one data qubit has no sacrificial set)")
    q = 2 * n - 1
    out, leakage = _register_output(q, (1 << n) - 1, chain, J_star)
    full = Statevector(build_basis(q), _fix_phase(out))
    p, post = measure(full, list(range(n, q)), [1] * (n - 1))
    fid = min(float(abs(post.overlap(w_state(n))) ** 2), 1.0)
    predicted = closed_form_p("two", n)
    if p <= math.pi / 4 and chain is None:
        raise ClaimViolation(f"success probability {p} fell below pi/4")
    return ProtocolResult(n, p, post, fid, predicted, full, leakage)
