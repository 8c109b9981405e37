"""Exact and iterative spectra, the bus ground doublet, and scaling fits.

Small sector dimensions go through dense eigh; larger ones use a
thick-restart Lanczos with full reorthogonalization so memory stays
bounded by the restart length times the sector dimension.
"""

import math
from dataclasses import dataclass

import numpy as np

from .basis import SpinBasis, Statevector, build_basis
from .hamiltonian import ChainSpec, heisenberg_hamiltonian

DENSE_CUTOFF = 4096
K_B_MEV_PER_MK = 8.617e-5

__all__ = [
    "DENSE_CUTOFF", "K_B_MEV_PER_MK", "EigenDecomposition", "LanczosError",
    "eig_dense", "eig_lowest", "BusManifold", "bus_manifold", "gap_formula",
    "gap_physical", "PowerLawFit", "fit_power_law", "mean_odd_coupling",
    "adiabatic_bus_bound",
]


@dataclass
class EigenDecomposition:
    """Eigenvalues ascending; vectors[:, i] belongs to values[i]."""
    values: np.ndarray
    vectors: np.ndarray


class LanczosError(RuntimeError):
    """Iteration budget exhausted before the requested pairs converged."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


def eig_dense(H):
    w, v = np.linalg.eigh(H.to_dense())
    return EigenDecomposition(w, v)


def _lanczos_lowest(H, k, tol, max_iter, m, seed_tag):
    dim = H.dim
    m = min(m, dim, max(max_iter, k + 1))
    scale = max(H.norm_bound(), 1e-300)
    rng = np.random.default_rng([seed_tag, dim, k])
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)

    V = np.empty((dim, m))
    T = np.zeros((m, m))
    V[:, 0] = v
    n_locked = 0          # leading Ritz block kept across restarts
    matvecs = 0
    best_res = np.inf

    while True:
        j = n_locked
        while j < m:
            w = H.matvec(V[:, j])
            matvecs += 1
            if j == n_locked and n_locked:
                # arrow row couples the new direction to the kept Ritz block
                w -= V[:, :n_locked] @ T[:n_locked, j]
            T[j, j] = V[:, j] @ w
            # full reorthogonalization, two passes
            for _ in range(2):
                w -= V[:, : j + 1] @ (V[:, : j + 1].T @ w)
            beta = np.linalg.norm(w)
            if j + 1 < m:
                if beta < 1e-13 * scale:
                    # invariant subspace; restart the recurrence randomly
                    w = rng.standard_normal(dim)
                    for _ in range(2):
                        w -= V[:, : j + 1] @ (V[:, : j + 1].T @ w)
                    beta = np.linalg.norm(w)
                    T[j, j + 1] = T[j + 1, j] = 0.0
                else:
                    T[j, j + 1] = T[j + 1, j] = beta
                V[:, j + 1] = w / beta
            else:
                last_beta, last_w = beta, w
            j += 1

        theta, S = np.linalg.eigh(T)
        res = np.abs(last_beta * S[m - 1, :k])
        worst = float(res.max()) if k else 0.0
        best_res = min(best_res, worst)
        if worst <= tol * scale or m == dim:
            X = V @ S[:, :k]
            X /= np.linalg.norm(X, axis=0)
            return theta[:k], X, matvecs
        if matvecs >= max_iter:
            raise LanczosError(
                f"no convergence after {matvecs} matvecs "
                f"(best residual {best_res:.3e}, target {tol * scale:.3e})",
                residual=best_res, iterations=matvecs)

        # thick restart: keep n_keep lowest Ritz vectors plus the residual
        n_keep = min(k + 10, m - 2)
        V[:, :n_keep] = V @ S[:, :n_keep]
        V[:, n_keep] = last_w / last_beta
        T[:, :] = 0.0
        T[:n_keep, :n_keep] = np.diag(theta[:n_keep])
        T[n_keep, :n_keep] = last_beta * S[m - 1, :n_keep]
        T[:n_keep, n_keep] = T[n_keep, :n_keep]
        n_locked = n_keep


def eig_lowest(H, k=1, tol=1e-10, max_iter=20000, restart_len=80):
    """Lowest k eigenpairs of a SparseHamiltonian.

    Dense below DENSE_CUTOFF, Lanczos above.  The start vector is derived
    deterministically from (dim, k), so repeated calls agree bit for bit.
    Raises LanczosError when max_iter matvecs do not reach tolerance.
    """
    if not 1 <= k <= H.dim:
        raise ValueError("k out of range")
    if H.dim <= DENSE_CUTOFF:
        dec = eig_dense(H)
        return EigenDecomposition(dec.values[:k], dec.vectors[:, :k])
    m = max(restart_len, 2 * k + 12)
    w, v, _ = _lanczos_lowest(H, k, tol, max_iter, m, seed_tag=0xC0FFEE)
    return EigenDecomposition(w, v)


@dataclass
class BusManifold:
    """Ground doublet data of an odd open chain.

    state1 is the S_z=+1/2 ground state with its largest-magnitude
    amplitude made real positive; state0 is its global spin flip.
    j_eff[i] = 2 <state1| s_iz |state1> gives the effective coupling
    weight a qubit attached at node i+1 inherits.
    """
    N: int
    energy: float
    gap: float
    j_eff: np.ndarray
    state1: Statevector
    state0: Statevector


def _fix_phase(amps):
    lead = np.argmax(np.abs(amps))
    if amps[lead].real < 0:
        return -amps
    return amps


def _spin_flipped(state, target_basis):
    mask = (1 << state.basis.n_sites) - 1
    flipped = state.basis.states ^ mask
    pos = target_basis.positions_of(flipped)
    out = np.zeros(target_basis.dim, dtype=complex)
    out[pos] = state.amplitudes
    return Statevector(target_basis, out)


def bus_manifold(spec, tol=1e-10, max_iter=20000):
    basis_up = build_basis(spec.N, sector=0.5)
    basis_dn = build_basis(spec.N, sector=-0.5)
    if spec.N == 1:
        one = Statevector(basis_up, np.array([1.0 + 0j]))
        zero = Statevector(basis_dn, np.array([1.0 + 0j]))
        return BusManifold(1, spec.B * 0.5, math.inf, np.array([1.0]), one, zero)

    H = heisenberg_hamiltonian(spec, basis_up)
    dec = eig_lowest(H, k=2, tol=tol, max_iter=max_iter)
    if dec.values[1] - dec.values[0] < 1e-9:
        raise ValueError("ground state of the S_z=+1/2 sector is degenerate; "
                         "the chain has no usable doublet")
    amps = _fix_phase(dec.vectors[:, 0].astype(complex))
    state1 = Statevector(basis_up, amps)

    # j_eff needs only amplitudes squared: sum |psi_c|^2 (2 bit_i(c) - 1)
    prob = np.abs(amps) ** 2
    j_eff = np.empty(spec.N)
    for i in range(spec.N):
        bit = (basis_up.states >> i) & 1
        j_eff[i] = np.sum(prob * (2.0 * bit - 1.0))

    state0 = _spin_flipped(state1, basis_dn)
    return BusManifold(spec.N, float(dec.values[0]), float(dec.values[1] - dec.values[0]),
                       j_eff, state1, state0)


def gap_formula(N, J_b=1.0):
    """Asymptotic finite-size gap J_b pi^2 / (2N) of the open chain."""
    return J_b * math.pi ** 2 / (2 * N)


def gap_physical(J_b_mev, N):
    """Bus gap expressed as a temperature in mK for J_b given in meV."""
    return gap_formula(N, J_b_mev) / K_B_MEV_PER_MK


@dataclass
class PowerLawFit:
    """Least-squares fit of y = prefactor * x**exponent on log-log axes."""
    exponent: float
    prefactor: float
    log_rms: float

    def predict(self, x):
        return self.prefactor * np.asarray(x, dtype=float) ** self.exponent


def fit_power_law(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need at least two points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    alpha, logc = np.polyfit(lx, ly, 1)
    resid = ly - (alpha * lx + logc)
    return PowerLawFit(float(alpha), float(np.exp(logc)),
                       float(np.sqrt(np.mean(resid ** 2))))


def mean_odd_coupling(j_eff):
    """Arithmetic mean of j_eff over odd nodes (1-based), where it is positive."""
    j_eff = np.asarray(j_eff)
    return float(np.mean(j_eff[0::2]))


def adiabatic_bus_bound(ratio):
    """Largest bus length keeping the gap above `ratio` times the qubit coupling.

    Inverts gap_formula against j_eff ~ 1.198/sqrt(N) weighting; rounding to
    the nearest integer reproduces the worked values (100 -> 60881).
    """
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    return int(round((math.pi ** 2 * ratio / 4) ** 2))
