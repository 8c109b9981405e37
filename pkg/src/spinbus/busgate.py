"""The star-coupled multiqubit gate: decoupling times, extraction, errors.

n qubits uniformly exchange-coupled to one effective bus spin evolve, at
the right moment, into 1_bus x U_n; U_n is diagonal in the total-spin
basis with a phase depending on j alone.  This module builds that model,
finds the moment, extracts U_n, and quantifies timing imperfections.
"""

import math
from dataclasses import dataclass

import numpy as np

from .angular import total_spin_basis
from .basis import build_basis
from .dynamics import _krylov_propagate
from .hamiltonian import pair_hamiltonian
from .spectral import DENSE_CUTOFF, bus_manifold

__all__ = [
    "StarModel", "star_hamiltonian", "decoupling_time", "BusGateReport",
    "FactorizationError", "bus_gate", "parity_phase_gate", "timing_error",
    "BoundViolation", "timing_fidelity_check", "max_gate_size",
    "gate_fidelity", "MicroscopicGateReport", "microscopic_bus_gate",
]


@dataclass(frozen=True)
class StarModel:
    """n qubits, each coupled with the same J_star to one central spin."""
    n: int
    J_star: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one qubit")
        if self.J_star <= 0:
            raise ValueError("star coupling must be positive "
                             "(antiferromagnetic attachment nodes)")

    @property
    def dim(self):
        return 1 << (self.n + 1)


def star_hamiltonian(model):
    """J* sum_i s_i.S on n+1 spins; central spin at bit 0, qubit i at bit i."""
    basis = build_basis(model.n + 1)
    pairs = [(0, k) for k in range(1, model.n + 1)]
    return pair_hamiltonian(basis, pairs, [model.J_star] * model.n)


def decoupling_time(n, J_star):
    """Earliest time at which the star evolution factors off the bus spin."""
    if n < 1 or J_star <= 0:
        raise ValueError("need n >= 1 and positive coupling")
    if n == 2:
        return 4 * math.pi / (3 * J_star)
    if n % 2:
        return 2 * math.pi / J_star
    return 4 * math.pi / J_star


class FactorizationError(RuntimeError):
    """U(tau) failed to factor as 1_bus x U_n at the requested tolerance."""


@dataclass
class BusGateReport:
    tau: float
    U_n: np.ndarray
    residual: float
    phases: dict


def _bus_major(U, n):
    """Reorder a (qubits x bus) propagator so the bus index is slowest."""
    d = 1 << n
    return U.reshape(d, 2, d, 2).transpose(1, 0, 3, 2).reshape(2 * d, 2 * d)


def _polar_unitary(G):
    u, s, vh = np.linalg.svd(G)
    return u @ vh, s


def bus_gate(model, tau=None):
    """Extract the qubit-space gate U_n at the decoupling time.

    U(tau) is exponentiated exactly; the two bus-diagonal blocks are
    averaged and re-unitarized (polar), and the residual is the spectral
    norm of U(tau) - 1 x U_n.  A residual above 1e-8 raises.
    """
    if tau is None:
        tau = decoupling_time(model.n, model.J_star)
    H = star_hamiltonian(model).to_dense()
    w, V = np.linalg.eigh(H)
    U = V @ (np.exp(-1j * w * tau)[:, None] * V.conj().T)
    Ub = _bus_major(U, model.n)
    d = 1 << model.n
    U_n, _ = _polar_unitary((Ub[:d, :d] + Ub[d:, d:]) / 2)
    diff = Ub - np.block([[U_n, np.zeros((d, d))], [np.zeros((d, d)), U_n]])
    residual = float(np.linalg.svd(diff, compute_uv=False)[0])
    if residual > 1e-8:
        raise FactorizationError(
            f"factorization residual {residual:.3e} at tau = {tau!r}; "
            "not a decoupling time")
    phases = {}
    for el in total_spin_basis(model.n):
        if el.j not in phases:
            phases[el.j] = complex(el.vector.conj() @ U_n @ el.vector)
    return BusGateReport(tau, U_n, residual, phases)


def parity_phase_gate(n):
    """diag over total-spin sectors of e^{-i pi j}: the ideal odd-n gate."""
    els = total_spin_basis(n)
    B = np.stack([el.vector for el in els], axis=1)
    ph = np.array([np.exp(-1j * math.pi * el.j) for el in els])
    return (B * ph) @ B.conj().T


def timing_error(model, delta):
    """(epsilon, bound) for a pulse stretched to tau(1 + delta).

    epsilon = ||U(tau~) - U(tau)|| is exact: the difference is normal, so
    the norm is max_k |e^{-i E_k tau delta} - 1| over the star spectrum.
    The small-delta law is bound = (pi/2)(n+2)|delta|.
    """
    tau = decoupling_time(model.n, model.J_star)
    w = np.linalg.eigvalsh(star_hamiltonian(model).to_dense())
    eps = float(2 * np.max(np.abs(np.sin(w * tau * delta / 2))))
    bound = (math.pi / 2) * (model.n + 2) * abs(delta)
    return eps, bound


class BoundViolation(RuntimeError):
    """A worst-case fidelity exceeded its analytic bound."""


def timing_fidelity_check(model, delta, trials, seed=20240817):
    """Worst 1 - f over random states, asserted against (pi^2/2)(n+1)^2 d^2.

    Half the trials draw product states, half fully random states; for a
    pure state 1 - f = 1 - |<psi| U(tau)^dag U(tau~) |psi>|^2.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    tau = decoupling_time(model.n, model.J_star)
    w, V = np.linalg.eigh(star_hamiltonian(model).to_dense())
    rng = np.random.default_rng([seed, model.n, trials])
    dim = model.dim
    worst = 0.0
    for trial in range(trials):
        if trial % 2:
            psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        else:
            psi = np.ones(1, dtype=complex)
            for _ in range(model.n + 1):
                spinor = rng.standard_normal(2) + 1j * rng.standard_normal(2)
                psi = np.kron(psi, spinor)
        psi /= np.linalg.norm(psi)
        c2 = np.abs(V.conj().T @ psi) ** 2
        overlap = np.sum(c2 * np.exp(-1j * w * tau * delta))
        worst = max(worst, float(1 - abs(overlap) ** 2))
    bound = (math.pi ** 2 / 2) * (model.n + 1) ** 2 * delta ** 2
    if worst > bound:
        raise BoundViolation(f"worst 1-f = {worst:.3e} exceeds bound {bound:.3e}")
    return worst


def max_gate_size(ratio):
    """Largest qubit count whose gate bandwidth stays inside the bus gap."""
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    return int(math.floor((math.pi ** 2 * ratio / math.sqrt(2)) ** (2 / 3) + 1e-12))


def gate_fidelity(U, V):
    """Average-phase-insensitive overlap |Tr(V^dag U)|^2 / dim^2."""
    d = U.shape[0]
    return float(abs(np.trace(V.conj().T @ U)) ** 2 / d ** 2)


@dataclass
class MicroscopicGateReport:
    tau: float
    U_n: np.ndarray
    off_norm: float
    singular_values: np.ndarray


def microscopic_bus_gate(spec, nodes, J_star, tau=None):
    """Run the gate on the full chain and project back onto the doublet.

    Qubit k attaches at 1-based bus node nodes[k] with microscopic coupling
    J_star / j_eff[node], so every effective coupling equals J_star.  The
    propagator is restricted to span{|b>_bus x qubits}, reordered bus-major,
    block-averaged, and re-unitarized.  Leakage out of the doublet shows up
    in singular_values < 1 and in off_norm.
    """
    n = len(nodes)
    if len(set(nodes)) != n or n < 1:
        raise ValueError("attachment nodes must be distinct")
    if any(v % 2 == 0 for v in nodes):
        raise ValueError("qubits attach on odd (antiferromagnetic) nodes only")
    if tau is None:
        tau = decoupling_time(n, J_star)
    man = bus_manifold(spec)
    N = spec.N
    full = build_basis(N + n)
    bonds = [(i, i + 1) for i in range(N - 1)]
    vals = list(spec.bond_couplings())
    for k, node in enumerate(nodes):
        bonds.append((node - 1, N + k))
        vals.append(J_star / man.j_eff[node - 1])
    H = pair_hamiltonian(full, bonds, vals, B=spec.B)

    psi_b = (man.state0.to_full(), man.state1.to_full())
    d = 1 << n
    cols = np.empty((full.dim, 2 * d), dtype=complex)
    for q in range(d):
        e_q = np.zeros(d, dtype=complex)
        e_q[q] = 1.0
        for b in (0, 1):
            cols[:, (q << 1) | b] = np.kron(e_q, psi_b[b])

    if full.dim <= DENSE_CUTOFF:
        w, V = np.linalg.eigh(H.to_dense())
        prop = V @ (np.exp(-1j * w * tau)[:, None] * (V.conj().T @ cols))
    else:
        prop = np.empty_like(cols)
        for c in range(cols.shape[1]):
            prop[:, c] = _krylov_propagate(H, cols[:, c], tau)

    M = cols.conj().T @ prop           # indices (q<<1)|b on both sides
    Mb = _bus_major(M, n)
    A, D = Mb[:d, :d], Mb[d:, d:]
    off = max(np.linalg.svd(Mb[:d, d:], compute_uv=False)[0],
              np.linalg.svd(Mb[d:, :d], compute_uv=False)[0])
    U_n, svals = _polar_unitary((A + D) / 2)
    return MicroscopicGateReport(tau, U_n, float(off), svals)
